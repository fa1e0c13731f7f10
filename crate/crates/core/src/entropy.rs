//! Scalar information measures for binary and Gaussian variables.
//!
//! Every quantity is in bits.

use crate::error::{domain, Result};

/// Iteration cap for [`h_inv`].
pub const H_INV_MAX_ITER: usize = 200;
/// Bracket width at which [`h_inv`] stops.
pub const H_INV_WIDTH: f64 = 1e-14;

/// Binary convolution `a(1-b) + (1-a)b`: the flip probability of two cascaded
/// independent flips.
#[inline]
pub fn star(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + (1.0 - a) * b
}

/// Binary entropy function.
///
/// Returns exactly `0.0` at both endpoints.
#[inline]
pub fn h(a: f64) -> f64 {
    if a <= 0.0 || a >= 1.0 {
        return 0.0;
    }
    -a * a.log2() - (1.0 - a) * (1.0 - a).log2()
}

/// Inverse of [`h`] restricted to `[0, 1/2]`.
///
/// Bisection on the strictly increasing branch of `h`.
pub fn h_inv(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return domain(format!("h_inv argument {c} outside [0, 1]"));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    if c == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..H_INV_MAX_ITER {
        if hi - lo <= H_INV_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if h(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `½·log2(1 + signal/noise)`, the rate of a real Gaussian channel.
pub fn gauss_rate(signal: f64, noise: f64) -> Result<f64> {
    if !(noise > 0.0) {
        return domain(format!("noise power must be positive, got {noise}"));
    }
    if signal < 0.0 {
        return domain(format!("signal power must be nonnegative, got {signal}"));
    }
    Ok(0.5 * (signal / noise).ln_1p() / std::f64::consts::LN_2)
}

/// Entropy of a finite distribution, with `0·log 0 = 0`.
pub fn entropy(dist: &[f64]) -> f64 {
    dist.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_examples() {
        for b in [0.0, 0.1, 0.37, 1.0] {
            assert_eq!(star(0.5, b), 0.5);
            assert_eq!(star(0.0, b), b);
        }
        assert!((star(0.2, 0.3) - 0.38).abs() < 1e-15);
    }

    #[test]
    fn h_examples() {
        assert_eq!(h(0.5), 1.0);
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h(1.0), 0.0);
        // -0.2 log2 0.2 - 0.8 log2 0.8, evaluated with mpmath at 30 digits
        assert!((h(0.2) - 0.721928094887362347870319429489).abs() < 1e-15);
    }

    #[test]
    fn h_inv_examples() {
        assert_eq!(h_inv(1.0).unwrap(), 0.5);
        assert_eq!(h_inv(0.0).unwrap(), 0.0);
        assert!((h_inv(0.721928094887362347870319429489).unwrap() - 0.2).abs() < 1e-12);
        assert!(h_inv(1.0 + 1e-9).is_err());
        assert!(h_inv(-1e-9).is_err());
        assert!(h_inv(f64::NAN).is_err());
    }

    #[test]
    fn gauss_rate_examples() {
        assert_eq!(gauss_rate(0.0, 2.0).unwrap(), 0.0);
        assert!((gauss_rate(1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((gauss_rate(3.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(gauss_rate(1.0, 0.0).is_err());
        assert!(gauss_rate(1.0, -1.0).is_err());
    }

    #[test]
    fn h_concave_on_grid() {
        let step = 1e-3;
        for k in 1..1000 {
            let u = k as f64 * step;
            let d2 = h(u + step) - 2.0 * h(u) + h(u - step);
            assert!(d2 <= 1e-9, "second difference {d2} at {u}");
        }
    }

    #[test]
    fn h_inv_round_trips_on_grid() {
        for k in 0..=500 {
            let a = k as f64 / 1000.0;
            assert!((h_inv(h(a)).unwrap() - a).abs() < 1e-10, "a = {a}");
        }
        for k in 0..=1000 {
            let c = k as f64 / 1000.0;
            assert!((h(h_inv(c).unwrap()) - c).abs() < 1e-10, "c = {c}");
        }
    }

    #[test]
    fn wyner_function_strictly_convex() {
        for rho in [0.05, 0.1, 0.2, 0.3, 0.45] {
            let f = |u: f64| h(star(rho, h_inv(u).unwrap()));
            let step = 1e-2;
            for k in 1..100 {
                let u = k as f64 * step;
                let d2 = f(u + step) - 2.0 * f(u) + f(u - step);
                assert!(d2 > 0.0, "rho {rho}, u {u}: {d2}");
            }
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn star_commutative_associative(a in 0.0..=1.0f64, b in 0.0..=1.0f64, c in 0.0..=1.0f64) {
                prop_assert!((star(a, b) - star(b, a)).abs() < 1e-12);
                prop_assert!((star(star(a, b), c) - star(a, star(b, c))).abs() < 1e-12);
                let s = star(a, b);
                prop_assert!((0.0..=1.0).contains(&s));
            }

            #[test]
            fn h_symmetric_and_bounded(a in 0.0..=1.0f64) {
                prop_assert!((h(a) - h(1.0 - a)).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&h(a)));
            }
        }
    }
}
