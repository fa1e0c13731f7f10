//! Sampled secrecy-capacity boundaries and their CSV form.
//!
//! CSV schema: header `model,param_json,R0,R1,alpha_star`, one row per sample,
//! floats printed with 12 significant digits, LF line endings.

use std::io::Write;

use rayon::prelude::*;
use serde_json::json;

use crate::channels::GaussianGmac;
use crate::error::{domain, Error, Result};
use crate::regions::{
    binary_secrecy_capacity, gaussian_mac_capacity, gaussian_max_common_rate, gaussian_secrecy_capacity,
    SecrecyPoint,
};

pub const DEFAULT_POINTS: usize = 201;
pub const CSV_HEADER: [&str; 5] = ["model", "param_json", "R0", "R1", "alpha_star"];

/// Which boundary a curve samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// `R0 + R1 = 1`; the `alpha_star` column holds the time-sharing weight on
    /// the private corner point.
    Deterministic,
    Binary { p: f64 },
    Gaussian(GaussianGmac),
    /// Straight line between the two extreme binary secrecy points; the
    /// `alpha_star` column holds the time-sharing weight on the `R0 = 0` point.
    TimeSharing { p: f64 },
    /// Private-rate boundary of the Gaussian MAC without a secrecy constraint.
    GaussianMac(GaussianGmac),
}

impl Model {
    pub fn tag(&self) -> &'static str {
        match self {
            Model::Deterministic => "deterministic",
            Model::Binary { .. } => "binary",
            Model::Gaussian(_) => "gaussian",
            Model::TimeSharing { .. } => "time_sharing",
            Model::GaussianMac(_) => "gaussian_mac",
        }
    }

    pub fn param_json(&self) -> String {
        let v = match self {
            Model::Deterministic => json!({}),
            Model::Binary { p } | Model::TimeSharing { p } => json!({ "p": p }),
            Model::Gaussian(g) | Model::GaussianMac(g) => {
                json!({ "P1": g.p1, "P2": g.p2, "N": g.n, "N2": g.n2 })
            }
        };
        v.to_string()
    }

    /// Admissible common-rate interval `[0, max]`.
    pub fn max_common_rate(&self) -> f64 {
        match self {
            Model::Deterministic | Model::Binary { .. } | Model::TimeSharing { .. } => 1.0,
            Model::Gaussian(g) | Model::GaussianMac(g) => gaussian_max_common_rate(g),
        }
    }

    /// Boundary value at common rate `r0`.
    pub fn point(&self, r0: f64) -> Result<SecrecyPoint> {
        match *self {
            Model::Deterministic => {
                if !(0.0..=1.0).contains(&r0) {
                    return domain(format!("common rate {r0} outside [0, 1]"));
                }
                Ok(SecrecyPoint { r1: 1.0 - r0, alpha_star: 1.0 - r0 })
            }
            Model::Binary { p } => binary_secrecy_capacity(r0, p),
            Model::Gaussian(ref g) => gaussian_secrecy_capacity(r0, g),
            Model::GaussianMac(ref g) => gaussian_mac_capacity(r0, g),
            Model::TimeSharing { p } => {
                let top = binary_secrecy_capacity(0.0, p)?.r1;
                if !(0.0..=1.0).contains(&r0) {
                    return domain(format!("common rate {r0} outside [0, 1]"));
                }
                Ok(SecrecyPoint { r1: (1.0 - r0) * top, alpha_star: 1.0 - r0 })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub r0: f64,
    pub r1: f64,
    pub alpha_star: f64,
}

/// Sampled upper boundary `R1 = C_s(R0)` of a secrecy region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCurve {
    pub model: Model,
    pub samples: Vec<CurveSample>,
}

/// Samples `model` on a uniform grid of `n_points` common rates spanning its
/// admissible range. Grid points are evaluated in parallel; the result does not
/// depend on the schedule.
pub fn sweep_secrecy_curve(model: Model, n_points: usize) -> Result<RegionCurve> {
    if n_points < 2 {
        return domain(format!("a curve needs at least 2 points, got {n_points}"));
    }
    if let Model::TimeSharing { p } = model {
        if !(p > 0.0 && p <= 0.5) {
            return domain(format!("time sharing baseline needs 0 < p <= 1/2, got {p}"));
        }
    }
    let max = model.max_common_rate();
    let last = n_points - 1;
    let samples = (0..n_points)
        .into_par_iter()
        .map(|k| {
            let r0 = if k == last { max } else { max * k as f64 / last as f64 };
            model.point(r0).map(|pt| CurveSample { r0, r1: pt.r1, alpha_star: pt.alpha_star })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionCurve { model, samples })
}

/// The straight time-sharing segment between `(0, C_s(0))` and `(1, 0)` of the
/// binary GMAC.
pub fn time_sharing_curve(p: f64, n_points: usize) -> Result<RegionCurve> {
    sweep_secrecy_curve(Model::TimeSharing { p }, n_points)
}

/// Tap crossover probabilities of the binary family figure.
pub const FIG4_P: [f64; 4] = [0.05, 0.1, 0.25, 0.5];
/// Crossover probability of the time-sharing comparison.
pub const FIG5_P: f64 = 0.2;
/// Powers and destination noise of the Gaussian figure (10 dB at the
/// destination).
pub const FIG6_POWER: f64 = 10.0;
pub const FIG6_NOISE: f64 = 1.0;
/// User-1-to-user-2 SNRs in dB of the Gaussian figure, with file labels.
pub const FIG6_TAP_SNR_DB: [(f64, &str); 3] = [(5.0, "p5db"), (0.0, "0db"), (-5.0, "m5db")];

/// Named curves making up one figure, in plotting order.
pub fn figure_curves(fig: u8, n_points: usize) -> Result<Vec<(String, RegionCurve)>> {
    match fig {
        4 => FIG4_P
            .iter()
            .map(|&p| Ok((format!("fig4_p{p}.csv"), sweep_secrecy_curve(Model::Binary { p }, n_points)?)))
            .collect(),
        5 => Ok(vec![
            ("fig5_secrecy.csv".into(), sweep_secrecy_curve(Model::Binary { p: FIG5_P }, n_points)?),
            ("fig5_time_sharing.csv".into(), time_sharing_curve(FIG5_P, n_points)?),
        ]),
        6 => {
            let mut out = Vec::new();
            let mut last = None;
            for (db, label) in FIG6_TAP_SNR_DB {
                let n2 = FIG6_POWER / 10f64.powf(db / 10.0);
                let g = GaussianGmac::new(FIG6_POWER, FIG6_POWER, FIG6_NOISE, n2)?;
                out.push((format!("fig6_snr_{label}.csv"), sweep_secrecy_curve(Model::Gaussian(g), n_points)?));
                last = Some(g);
            }
            let g = last.expect("three tap SNRs");
            out.push(("fig6_mac.csv".into(), sweep_secrecy_curve(Model::GaussianMac(g), n_points)?));
            Ok(out)
        }
        _ => Err(Error::Config(format!("no figure {fig}; choose 4, 5 or 6"))),
    }
}

impl RegionCurve {
    /// `R0` strictly increasing and `R1` non-increasing up to `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.samples
            .windows(2)
            .all(|w| w[1].r0 > w[0].r0 && w[1].r1 <= w[0].r1 + tol)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(CSV_HEADER)?;
        let (tag, params) = (self.model.tag(), self.model.param_json());
        for s in &self.samples {
            w.write_record([
                tag,
                params.as_str(),
                &format_sig(s.r0, 12),
                &format_sig(s.r1, 12),
                &format_sig(s.alpha_star, 12),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Formats `x` with `digits` significant digits in the style of C's `%g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent formatting");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
