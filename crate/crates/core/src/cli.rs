//! Command-line front end. Exit codes: 0 success, 1 a verification failed,
//! 2 usage or input error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::channels::{binary_gmac, deterministic_example, FiniteGmac, GaussianGmac};
use crate::curves::{figure_curves, sweep_secrecy_curve, Model, DEFAULT_POINTS};
use crate::error::{Error, Result};
use crate::lemmas::{
    gaussian_theorem_terms, lemma1_bounds, lemma1_grid_max_secrecy, verify_lemma2, verify_lemma3_epi, GridSearch,
    InputDistribution, EPI_DEFAULT_STEP,
};
use crate::oracle::{evaluate, random_superposition_code, Codebook, SuperpositionParams};
use crate::regions::{
    binary_best_slack, binary_bounds, binary_secrecy_capacity, deterministic_region_member, gaussian_best_slack,
    gaussian_bounds, gaussian_knee, gaussian_max_common_rate, RateTriple, RegionBounds, MEMBER_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// Environment variable capping the worker threads of parallel sweeps.
pub const THREADS_ENV: &str = "GMAC_SECRECY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gmac-secrecy", version, about = "Secrecy capacity regions of generalized multiple access channels")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the secrecy capacity boundary R1 = C(R0) and write it as CSV.
    Region(RegionArgs),
    /// Test whether a rate point lies in a capacity-equivocation region.
    Member(MemberArgs),
    /// Write the CSV curves behind one of the three figures.
    Figure(FigureArgs),
    /// Run a numerical check; exits 1 if it fails.
    Verify(VerifyArgs),
    /// Exact evaluation of explicit finite-blocklength codes.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelKind {
    Deterministic,
    Binary,
    Gaussian,
}

#[derive(Debug, Args)]
struct ModelParams {
    /// Crossover probability of the binary tap.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    /// Destination noise variance (blocklength for `verify --lemma 3`).
    #[arg(long)]
    n: Option<f64>,
    /// Noise variance at user 2.
    #[arg(long)]
    n2: Option<f64>,
}

impl ModelParams {
    fn binary_p(&self) -> Result<f64> {
        self.p.ok_or_else(|| Error::Config("the binary model requires --p".into()))
    }

    fn gaussian(&self) -> Result<GaussianGmac> {
        match (self.p1, self.p2, self.n, self.n2) {
            (Some(p1), Some(p2), Some(n), Some(n2)) => GaussianGmac::new(p1, p2, n, n2),
            _ => Err(Error::Config("the gaussian model requires --p1, --p2, --n and --n2".into())),
        }
    }

    fn any_gaussian(&self) -> bool {
        self.p1.is_some() || self.p2.is_some() || self.n.is_some() || self.n2.is_some()
    }

    fn model(&self, kind: ModelKind) -> Result<Model> {
        Ok(match kind {
            ModelKind::Deterministic => Model::Deterministic,
            ModelKind::Binary => {
                let p = self.binary_p()?;
                binary_gmac(p)?;
                Model::Binary { p }
            }
            ModelKind::Gaussian => Model::Gaussian(self.gaussian()?),
        })
    }
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[arg(value_enum)]
    model: ModelKind,
    #[command(flatten)]
    params: ModelParams,
    /// Number of common-rate samples.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MemberArgs {
    #[arg(value_enum)]
    model: ModelKind,
    #[command(flatten)]
    params: ModelParams,
    #[arg(long)]
    r0: f64,
    #[arg(long)]
    r1: f64,
    /// Equivocation rate; defaults to R1 (perfect secrecy).
    #[arg(long)]
    re: Option<f64>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(4..=6))]
    fig: u8,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    #[value(name = "2")]
    Convexity,
    #[value(name = "3")]
    BinaryEpi,
    AchievabilityBinary,
    AchievabilityGaussian,
    Degraded,
    GridVsClosedForm,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    lemma: Check,
    #[command(flatten)]
    params: ModelParams,
    /// Crossover of the convexity check; repeatable.
    #[arg(long)]
    rho: Vec<f64>,
    #[arg(long, default_value_t = 0.2)]
    p0: f64,
    #[arg(long, default_value_t = 0.5)]
    v: f64,
    /// Grid step; the default depends on the check.
    #[arg(long)]
    step: Option<f64>,
    /// Common rates of the grid comparison; repeatable.
    #[arg(long)]
    r0: Vec<f64>,
    /// Number of values of the time-sharing variable in the grid search.
    #[arg(long, default_value_t = 2)]
    q_size: usize,
    /// Channel spec of the degradedness check.
    #[arg(long)]
    channel: Option<String>,
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Evaluate a codebook JSON file on a channel and print the report as JSON.
    Evaluate {
        #[arg(long)]
        code: PathBuf,
        /// `deterministic`, `binary:p=<p>` or a channel JSON file.
        #[arg(long)]
        channel: String,
    },
    /// Draw a random binary superposition code.
    Superposition {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m0: usize,
        #[arg(long, default_value_t = 2)]
        m1: usize,
        #[arg(long, default_value_t = 1)]
        aux_bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the code here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also evaluate the code on this channel and print the report.
        #[arg(long)]
        channel: Option<String>,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a pool installed earlier in the same process wins
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses a channel spec: `deterministic`, `binary:p=<p>`, or a JSON file.
pub fn parse_channel(spec: &str) -> Result<FiniteGmac> {
    if spec == "deterministic" {
        return Ok(deterministic_example());
    }
    if let Some(rest) = spec.strip_prefix("binary:") {
        let p = rest
            .strip_prefix("p=")
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| Error::Config(format!("bad channel spec {spec:?}; expected binary:p=<value>")))?;
        return binary_gmac(p);
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| Error::Config(format!("channel {spec:?} is neither a built-in spec nor a readable file: {e}")))?;
    FiniteGmac::from_json(&text)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        Command::Region(a) => cmd_region(a, out).map(|_| true),
        Command::Member(a) => cmd_member(a, out).map(|_| true),
        Command::Figure(a) => cmd_figure(a, out).map(|_| true),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Oracle(c) => cmd_oracle(c, out).map(|_| true),
    }
}

fn cmd_region(a: RegionArgs, out: &mut dyn Write) -> Result<()> {
    let model = a.params.model(a.model)?;
    let curve = sweep_secrecy_curve(model, a.points)?;
    let summary = match model {
        Model::Binary { p } => {
            let first = binary_secrecy_capacity(0.0, p)?;
            let last = binary_secrecy_capacity(1.0, p)?;
            format!(
                "alpha* = {} at R0 = 0 (R1 = {}), alpha* = {} at R0 = 1 (R1 = {})",
                first.alpha_star, first.r1, last.alpha_star, last.r1
            )
        }
        Model::Gaussian(g) => {
            let flat = curve.samples[0].r1;
            format!(
                "knee at R0 = {} with R1 = {}; common rate reaches {}",
                gaussian_knee(&g),
                flat,
                gaussian_max_common_rate(&g)
            )
        }
        _ => "boundary R0 + R1 = 1".to_string(),
    };
    match a.out {
        Some(path) => {
            let file = fs::File::create(&path)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            curve.write_csv(io::BufWriter::new(file))?;
            writeln!(out, "{summary}")?;
            writeln!(out, "wrote {} samples to {}", curve.samples.len(), path.display())?;
        }
        None => {
            curve.write_csv(&mut *out)?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_member(a: MemberArgs, out: &mut dyn Write) -> Result<()> {
    let t = RateTriple::new(a.r0, a.r1, a.re.unwrap_or(a.r1));
    let (member, slack, alpha) = match a.model {
        ModelKind::Deterministic => (deterministic_region_member(&t), None, None),
        ModelKind::Binary => {
            let p = a.params.binary_p()?;
            binary_gmac(p)?;
            let (alpha, slack) = binary_best_slack(&t, p);
            (slack >= -MEMBER_TOL, Some(slack), Some(alpha))
        }
        ModelKind::Gaussian => {
            let g = a.params.gaussian()?;
            let (alpha, slack) = gaussian_best_slack(&t, &g);
            (slack >= -MEMBER_TOL, Some(slack), Some(alpha))
        }
    };
    let report = json!({ "member": member, "slack": slack, "alpha": alpha });
    writeln!(out, "{report}")?;
    Ok(())
}

fn cmd_figure(a: FigureArgs, out: &mut dyn Write) -> Result<()> {
    let curves = figure_curves(a.fig, a.points)?;
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", a.out_dir.display())))?;
    for (name, curve) in curves {
        let path = a.out_dir.join(name);
        write_curve(&path, &curve)?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn write_curve(path: &Path, curve: &crate::curves::RegionCurve) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    let mut w = io::BufWriter::new(file);
    curve.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

const BINARY_ACHIEVABILITY_TOL: f64 = 1e-10;
const GAUSSIAN_ACHIEVABILITY_TOL: f64 = 1e-9;
const GRID_GAP_TOL: f64 = 1e-3;
const GRID_EXCESS_TOL: f64 = 1e-9;
const GAUSSIAN_PRESETS: [(f64, f64, f64, f64); 3] = [(1.0, 1.0, 1.0, 2.0), (10.0, 10.0, 1.0, 31.62), (1.0, 4.0, 1.0, 4.0)];

fn max_bound_diff(a: &RegionBounds, b: &RegionBounds) -> f64 {
    [
        a.r1_max - b.r1_max,
        a.sum_max - b.sum_max,
        a.re_max - b.re_max,
        a.r0_plus_re_max - b.r0_plus_re_max,
    ]
    .iter()
    .fold(0.0, |m, d| m.max(d.abs()))
}

fn verdict(out: &mut dyn Write, ok: bool) -> Result<bool> {
    writeln!(out, "{}", if ok { "PASS" } else { "FAIL" })?;
    Ok(ok)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    match a.lemma {
        Check::Convexity => {
            let rhos = if a.rho.is_empty() { vec![0.1, 0.2, 0.3, 0.45] } else { a.rho.clone() };
            let step = a.step.unwrap_or(1e-3);
            let mut ok = true;
            for rho in rhos {
                let d = verify_lemma2(rho, step)?;
                writeln!(out, "rho {rho}: min second difference {d:e}")?;
                ok &= d > 0.0;
            }
            verdict(out, ok)
        }
        Check::BinaryEpi => {
            // --n is the blocklength here
            let n = a.params.n.unwrap_or(2.0);
            if n.fract() != 0.0 || n < 1.0 {
                return Err(Error::Config(format!("blocklength --n must be a positive integer, got {n}")));
            }
            let n = n as usize;
            let r = verify_lemma3_epi(n, a.p0, a.v, a.step.unwrap_or(EPI_DEFAULT_STEP))?;
            writeln!(
                out,
                "n {} p0 {} v {}: {} distributions, min slack {:e}, {} equality cases",
                n,
                a.p0,
                a.v,
                r.evaluated,
                r.min_slack,
                r.equality_cases.len()
            )?;
            if let Some(bad) = r.equality_cases.iter().find(|c| !c.matches_characterization) {
                writeln!(
                    out,
                    "equality case outside the characterization: p(x) = {:?}, independent {}, H(Xi) = {:?}",
                    bad.dist, bad.independent, bad.marginal_entropies
                )?;
            }
            writeln!(out, "inequality holds: {}; equality cases consistent: {}", r.holds, r.equality_consistent)?;
            verdict(out, r.holds && r.equality_consistent)
        }
        Check::AchievabilityBinary => {
            let ps = match a.params.p {
                Some(p) => vec![p],
                None => vec![0.1, 0.2, 0.3],
            };
            let mut worst: f64 = 0.0;
            for p in ps {
                let ch = binary_gmac(p)?;
                for k in 0..=50 {
                    let alpha = k as f64 / 100.0;
                    let b = lemma1_bounds(&ch, &InputDistribution::binary_superposition(alpha)?)?;
                    worst = worst.max(max_bound_diff(&b, &binary_bounds(alpha, p)));
                }
            }
            writeln!(out, "max discrepancy {worst:e} (tolerance {BINARY_ACHIEVABILITY_TOL:e})")?;
            verdict(out, worst <= BINARY_ACHIEVABILITY_TOL)
        }
        Check::AchievabilityGaussian => {
            let presets = if a.params.any_gaussian() {
                let g = a.params.gaussian()?;
                vec![(g.p1, g.p2, g.n, g.n2)]
            } else {
                GAUSSIAN_PRESETS.to_vec()
            };
            let mut worst: f64 = 0.0;
            for (p1, p2, n, n2) in presets {
                let g = GaussianGmac::new(p1, p2, n, n2)?;
                for k in 0..=100 {
                    let alpha = k as f64 / 100.0;
                    worst = worst.max(max_bound_diff(&gaussian_theorem_terms(&g, alpha)?, &gaussian_bounds(alpha, &g)));
                }
            }
            writeln!(out, "max discrepancy {worst:e} (tolerance {GAUSSIAN_ACHIEVABILITY_TOL:e})")?;
            verdict(out, worst <= GAUSSIAN_ACHIEVABILITY_TOL)
        }
        Check::Degraded => {
            if a.params.any_gaussian() {
                let g = a.params.gaussian()?;
                let diff = g.marginal_laws().max_abs_diff(&g.degraded_equivalent()?.marginal_laws());
                writeln!(out, "marginal mismatch with the degraded equivalent: {diff:e}")?;
                verdict(out, diff == 0.0)
            } else {
                let spec = a.channel.as_deref().unwrap_or("binary:p=0.2");
                let d = parse_channel(spec)?.degradedness();
                writeln!(out, "{spec}: degraded {}, max violation {:e}", d.degraded, d.max_violation)?;
                verdict(out, d.degraded)
            }
        }
        Check::GridVsClosedForm => {
            let p = a.params.p.unwrap_or(0.2);
            let ch = binary_gmac(p)?;
            let r0s = if a.r0.is_empty() { vec![0.0, 0.25, 0.5, 0.75] } else { a.r0.clone() };
            let opts = GridSearch { step: a.step.unwrap_or(GridSearch::default().step), q_size: a.q_size, refine: true };
            let mut ok = true;
            for r0 in r0s {
                let closed = binary_secrecy_capacity(r0, p)?.r1;
                let opt = lemma1_grid_max_secrecy(&ch, r0, &opts)?;
                let gap = closed - opt.r1;
                writeln!(out, "R0 {r0}: grid {} refined {} closed form {} gap {gap:e}", opt.grid_r1, opt.r1, closed)?;
                ok &= gap <= GRID_GAP_TOL && gap >= -GRID_EXCESS_TOL;
            }
            verdict(out, ok)
        }
    }
}

fn cmd_oracle(c: OracleCommand, out: &mut dyn Write) -> Result<()> {
    match c {
        OracleCommand::Evaluate { code, channel } => {
            let text = fs::read_to_string(&code)
                .map_err(|e| Error::Config(format!("cannot read code file {}: {e}", code.display())))?;
            let code = Codebook::from_json(&text)?;
            let report = evaluate(&code, &parse_channel(&channel)?)?;
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
        OracleCommand::Superposition { alpha, n, m0, m1, aux_bins, seed, out: path, channel } => {
            let code = random_superposition_code(&SuperpositionParams { alpha, n, m0, m1, aux_bins, seed })?;
            match &path {
                Some(p) => fs::write(p, code.to_json())
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?,
                None if channel.is_none() => writeln!(out, "{}", code.to_json())?,
                None => {}
            }
            if let Some(spec) = channel {
                let report = evaluate(&code, &parse_channel(&spec)?)?;
                writeln!(out, "{}", serde_json::to_string(&report)?)?;
            }
        }
    }
    Ok(())
}
