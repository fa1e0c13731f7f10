//! Closed-form capacity-equivocation and secrecy capacity regions.
//!
//! Each region is a union over a scalar superposition parameter `alpha` of a
//! polytope cut out by four rate bounds ([`RegionBounds`]). Membership is
//! decided by maximizing the constraint slack over `alpha`; the secrecy
//! capacity curves solve for the `alpha` at which the two binding constraints
//! meet.

use serde::{Deserialize, Serialize};

use crate::channels::GaussianGmac;
use crate::entropy::{h, h_inv, star};
use crate::error::{domain, Result};

/// Slack tolerance for boundary membership.
pub const MEMBER_TOL: f64 = 1e-9;
/// Grid step of the `alpha` sweep that seeds each membership search.
pub const ALPHA_SWEEP_STEP: f64 = 1e-4;
/// Tolerance of the exact-equality checks of the deterministic region.
pub const DETERMINISTIC_TOL: f64 = 1e-12;

const SOLVER_MAX_ITER: usize = 200;

/// A rate-equivocation triple in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    pub r0: f64,
    pub r1: f64,
    pub re: f64,
}

impl RateTriple {
    pub fn new(r0: f64, r1: f64, re: f64) -> Self {
        RateTriple { r0, r1, re }
    }

    /// The perfect-secrecy triple `(r0, r1, r1)`.
    pub fn secret(r0: f64, r1: f64) -> Self {
        RateTriple { r0, r1, re: r1 }
    }
}

/// The four mutual-information bounds that define one polytope of a region:
///
/// ```text
/// R1      <= r1_max
/// R0 + R1 <= sum_max
/// Re      <= re_max,   0 <= Re <= R1
/// R0 + Re <= r0_plus_re_max
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionBounds {
    pub r1_max: f64,
    pub sum_max: f64,
    pub re_max: f64,
    pub r0_plus_re_max: f64,
}

impl RegionBounds {
    /// Smallest constraint slack of `t`; nonnegative iff `t` lies in the polytope.
    pub fn slack(&self, t: &RateTriple) -> f64 {
        [
            t.r0,
            t.r1,
            t.re,
            t.r1 - t.re,
            self.r1_max - t.r1,
            self.sum_max - (t.r0 + t.r1),
            self.re_max - t.re,
            self.r0_plus_re_max - (t.r0 + t.re),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    /// Largest perfect-secrecy `R1` at common rate `r0`, possibly negative when
    /// `r0` itself is not supported by this polytope.
    pub fn secret_rate(&self, r0: f64) -> f64 {
        self.r1_max
            .min(self.re_max)
            .min(self.sum_max - r0)
            .min(self.r0_plus_re_max - r0)
    }
}

/// Membership in the deterministic multiplier/bias region
/// `{R0 + R1 <= 1, Re = R1}`.
pub fn deterministic_region_member(t: &RateTriple) -> bool {
    t.r0 >= 0.0
        && t.r1 >= 0.0
        && t.r0 + t.r1 <= 1.0 + DETERMINISTIC_TOL
        && (t.re - t.r1).abs() <= DETERMINISTIC_TOL
}

fn check_crossover(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return domain(format!("crossover probability {p} outside [0, 1/2]"));
    }
    Ok(())
}

/// Polytope of the binary GMAC at superposition parameter `alpha ∈ [0, 1/2]`.
pub fn binary_bounds(alpha: f64, p: f64) -> RegionBounds {
    let leak = h(star(p, alpha)) - h(p);
    RegionBounds {
        r1_max: h(alpha),
        sum_max: 1.0,
        re_max: h(alpha) - leak,
        r0_plus_re_max: 1.0 - leak,
    }
}

#[inline]
fn half_log2_ratio(num: f64, den: f64) -> f64 {
    0.5 * (num / den).log2()
}

#[inline]
fn rate(signal: f64, noise: f64) -> f64 {
    0.5 * (signal / noise).ln_1p() / std::f64::consts::LN_2
}

/// Polytope of the Gaussian GMAC at correlation parameter `alpha ∈ [0, 1]`
/// (`1 - alpha` of user 1's power is coherent with user 2).
pub fn gaussian_bounds(alpha: f64, g: &GaussianGmac) -> RegionBounds {
    let private = rate(alpha * g.p1, g.n);
    let sum = rate(g.p1 + g.p2 + 2.0 * ((1.0 - alpha) * g.p1 * g.p2).sqrt(), g.n);
    let leak = rate(alpha * g.p1, g.n2);
    RegionBounds {
        r1_max: private,
        sum_max: sum,
        re_max: private - leak,
        r0_plus_re_max: sum - leak,
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` over `[lo, hi]` with a uniform sweep at `step` followed by a
/// golden-section refinement around the best sample. Returns `(argmax, max)`.
pub(crate) fn sweep_then_golden(lo: f64, hi: f64, step: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let at = |k: usize| if k == n { hi } else { lo + k as f64 * step };
    let (mut best_k, mut best) = (0, f(lo));
    for k in 1..=n {
        let v = f(at(k));
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let (mut a, mut b) = (at(best_k.saturating_sub(1)), at((best_k + 1).min(n)));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..SOLVER_MAX_ITER {
        if b - a <= 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let (x, v) = if fc > fd { (c, fc) } else { (d, fd) };
    if v > best {
        (x, v)
    } else {
        (at(best_k), best)
    }
}

/// Largest constraint slack of `t` over the binary union, and its `alpha`.
pub fn binary_best_slack(t: &RateTriple, p: f64) -> (f64, f64) {
    sweep_then_golden(0.0, 0.5, ALPHA_SWEEP_STEP, |a| binary_bounds(a, p).slack(t))
}

/// Membership in the binary capacity-equivocation region.
pub fn binary_region_member(t: &RateTriple, p: f64) -> Result<bool> {
    check_crossover(p)?;
    Ok(binary_best_slack(t, p).1 >= -MEMBER_TOL)
}

/// Membership of `(r0, r1)` in the binary secrecy capacity region.
pub fn binary_secrecy_member(r0: f64, r1: f64, p: f64) -> Result<bool> {
    binary_region_member(&RateTriple::secret(r0, r1), p)
}

/// Largest constraint slack of `t` over the Gaussian union, and its `alpha`.
pub fn gaussian_best_slack(t: &RateTriple, g: &GaussianGmac) -> (f64, f64) {
    sweep_then_golden(0.0, 1.0, ALPHA_SWEEP_STEP, |a| gaussian_bounds(a, g).slack(t))
}

/// Membership in the Gaussian capacity-equivocation region.
pub fn gaussian_region_member(t: &RateTriple, g: &GaussianGmac) -> bool {
    gaussian_best_slack(t, g).1 >= -MEMBER_TOL
}

/// A point on a secrecy capacity boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyPoint {
    pub r1: f64,
    pub alpha_star: f64,
}

/// Binary secrecy capacity `C(R0) = h(a) + h(p) - h(p*a)` with `h(a) = 1 - R0`.
pub fn binary_secrecy_capacity(r0: f64, p: f64) -> Result<SecrecyPoint> {
    check_crossover(p)?;
    if !(0.0..=1.0).contains(&r0) {
        return domain(format!("common rate {r0} outside [0, 1]"));
    }
    let alpha_star = h_inv(1.0 - r0)?;
    let r1 = h(alpha_star) + h(p) - h(star(p, alpha_star));
    Ok(SecrecyPoint { r1, alpha_star })
}

/// Common rate below which the Gaussian secrecy capacity is flat:
/// `½·log2((P1 + P2 + N) / (P1 + N))`.
pub fn gaussian_knee(g: &GaussianGmac) -> f64 {
    half_log2_ratio(g.p1 + g.p2 + g.n, g.p1 + g.n)
}

/// Largest common rate, reached with fully coherent inputs.
pub fn gaussian_max_common_rate(g: &GaussianGmac) -> f64 {
    rate(g.p1 + g.p2 + 2.0 * (g.p1 * g.p2).sqrt(), g.n)
}

/// Common rate at which the private and sum constraints meet:
/// `½·log2((P1 + P2 + 2√((1-α)P1P2) + N) / (αP1 + N))`.
pub fn gaussian_common_rate_at(alpha: f64, g: &GaussianGmac) -> f64 {
    half_log2_ratio(
        g.p1 + g.p2 + 2.0 * ((1.0 - alpha) * g.p1 * g.p2).sqrt() + g.n,
        alpha * g.p1 + g.n,
    )
}

/// Solves `gaussian_common_rate_at(alpha) = r0` for `alpha`.
///
/// The bisection runs on `b = √(1 - alpha)`, in which the common rate is smooth
/// and strictly increasing; in `alpha` itself the square root makes the
/// equation ill-conditioned next to `alpha = 1`.
fn gaussian_alpha_star(r0: f64, g: &GaussianGmac) -> f64 {
    let coherent = 2.0 * (g.p1 * g.p2).sqrt();
    let at = |b: f64| half_log2_ratio(g.p1 + g.p2 + coherent * b + g.n, (1.0 - b * b) * g.p1 + g.n);
    if r0 >= at(1.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..SOLVER_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid) < r0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = 0.5 * (lo + hi);
    (1.0 - b * b).clamp(0.0, 1.0)
}

fn check_gaussian_common_rate(r0: f64, g: &GaussianGmac) -> Result<()> {
    let max = gaussian_max_common_rate(g);
    if !(r0 >= 0.0 && r0 <= max + 1e-12) {
        return domain(format!("common rate {r0} outside [0, {max}]"));
    }
    Ok(())
}

/// Gaussian secrecy capacity at common rate `r0`.
pub fn gaussian_secrecy_capacity(r0: f64, g: &GaussianGmac) -> Result<SecrecyPoint> {
    check_gaussian_common_rate(r0, g)?;
    let alpha_star = if r0 <= gaussian_knee(g) { 1.0 } else { gaussian_alpha_star(r0, g) };
    let r1 = rate(alpha_star * g.p1, g.n) - rate(alpha_star * g.p1, g.n2);
    Ok(SecrecyPoint { r1: r1.max(0.0), alpha_star })
}

/// Private-rate boundary of the same Gaussian MAC with no secrecy constraint.
pub fn gaussian_mac_capacity(r0: f64, g: &GaussianGmac) -> Result<SecrecyPoint> {
    check_gaussian_common_rate(r0, g)?;
    let alpha_star = if r0 <= gaussian_knee(g) { 1.0 } else { gaussian_alpha_star(r0, g) };
    Ok(SecrecyPoint { r1: rate(alpha_star * g.p1, g.n), alpha_star })
}

#[cfg(test)]
mod tests {
    use super::*;

    const H02: f64 = 0.721928094887362347870319429489;

    #[test]
    fn deterministic_membership() {
        assert!(deterministic_region_member(&RateTriple::new(0.5, 0.5, 0.5)));
        assert!(deterministic_region_member(&RateTriple::new(0.0, 1.0, 1.0)));
        assert!(!deterministic_region_member(&RateTriple::new(0.6, 0.5, 0.5)));
        assert!(!deterministic_region_member(&RateTriple::new(0.2, 0.5, 0.4)));
    }

    #[test]
    fn binary_membership_examples() {
        assert!(binary_region_member(&RateTriple::new(0.0, H02, H02), 0.2).unwrap());
        for p in [0.0, 0.1, 0.5] {
            assert!(binary_region_member(&RateTriple::new(1.0, 0.0, 0.0), p).unwrap());
        }
        assert!(!binary_region_member(&RateTriple::new(0.0, 1.0, 1.0), 0.2).unwrap());
        assert!(!binary_region_member(&RateTriple::new(0.1, 0.3, 0.4), 0.2).unwrap());
        assert!(binary_region_member(&RateTriple::new(0.0, 0.0, 0.0), 0.7).is_err());
    }

    #[test]
    fn binary_capacity_examples() {
        for p in [0.0, 0.2, 0.5] {
            let pt = binary_secrecy_capacity(1.0, p).unwrap();
            assert_eq!(pt.r1, 0.0);
            assert_eq!(pt.alpha_star, 0.0);
        }
        assert!((binary_secrecy_capacity(0.0, 0.5).unwrap().r1 - 1.0).abs() < 1e-15);
        let pt = binary_secrecy_capacity(0.0, 0.2).unwrap();
        assert!((pt.r1 - H02).abs() < 1e-15);
        assert_eq!(pt.alpha_star, 0.5);
        assert!(binary_secrecy_capacity(1.0 + 1e-9, 0.2).is_err());
        assert!(binary_secrecy_capacity(-1e-9, 0.2).is_err());
    }

    #[test]
    fn binary_capacity_on_boundary() {
        for p in [0.05, 0.1, 0.25, 0.5] {
            for k in 0..=20 {
                let r0 = k as f64 / 20.0;
                let c = binary_secrecy_capacity(r0, p).unwrap().r1;
                assert!(binary_secrecy_member(r0, c, p).unwrap(), "p {p} r0 {r0}");
                assert!(!binary_secrecy_member(r0, c + 1e-3, p).unwrap(), "p {p} r0 {r0}");
            }
        }
    }

    #[test]
    fn gaussian_capacity_examples() {
        let g = GaussianGmac::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let flat = 0.5 - 0.5 * 1.5_f64.log2();
        let pt = gaussian_secrecy_capacity(0.0, &g).unwrap();
        assert!((pt.r1 - flat).abs() < 1e-12);
        assert_eq!(pt.alpha_star, 1.0);

        let top = gaussian_secrecy_capacity(gaussian_max_common_rate(&g), &g).unwrap();
        assert!(top.r1.abs() < 1e-9 && top.alpha_star < 1e-9);
        assert!(gaussian_secrecy_capacity(gaussian_max_common_rate(&g) + 1e-6, &g).is_err());

        let far = GaussianGmac::new(1.0, 1.0, 1.0, 1e12).unwrap();
        assert!((gaussian_secrecy_capacity(0.0, &far).unwrap().r1 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn gaussian_alpha_star_solves_defining_equation() {
        let g = GaussianGmac::new(10.0, 10.0, 1.0, 31.62).unwrap();
        let (knee, top) = (gaussian_knee(&g), gaussian_max_common_rate(&g));
        for k in 1..100 {
            let r0 = knee + (top - knee) * k as f64 / 100.0;
            let a = gaussian_secrecy_capacity(r0, &g).unwrap().alpha_star;
            assert!((gaussian_common_rate_at(a, &g) - r0).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_membership_examples() {
        let g = GaussianGmac::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let c = rate(1.0, 1.0) - rate(1.0, 2.0);
        assert!(gaussian_region_member(&RateTriple::new(0.0, c, c), &g));
        assert!(!gaussian_region_member(&RateTriple::new(0.0, c + 1e-4, c + 1e-4), &g));
        assert!(gaussian_region_member(&RateTriple::new(0.0, 0.0, 0.0), &g));
        assert!(!gaussian_region_member(&RateTriple::new(0.0, 0.1, 0.11), &g));
    }

    #[test]
    fn golden_refinement_finds_interior_peak() {
        let (x, v) = sweep_then_golden(0.0, 1.0, 0.1, |x| -(x - 0.333_333).powi(2));
        assert!((x - 0.333_333).abs() < 1e-6);
        assert!(v <= 0.0 && v > -1e-12);
    }
}
