//! Channel models: finite-alphabet GMACs and the Gaussian parameter block.
//!
//! A finite GMAC is a transition table `p(y, y2 | x1, x2)` where `y` is the
//! destination output and `y2` is what user 2 overhears. The Gaussian model is
//! never sampled; it is carried around as its four powers and every
//! information quantity on it is computed in closed form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Row-sum tolerance for transition tables.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Tolerance on the conditional mismatch when testing physical degradedness.
pub const DEGRADED_TOL: f64 = 1e-9;

/// A channel input or output symbol as it appears in JSON files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Symbol {
    Int(i64),
    Text(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Int(v) => write!(f, "{v}"),
            Symbol::Text(s) => f.write_str(s),
        }
    }
}

/// The four alphabets of a GMAC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alphabets {
    pub x1: Vec<Symbol>,
    pub x2: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub y2: Vec<Symbol>,
}

impl Alphabets {
    fn binary() -> Self {
        let b = || vec![Symbol::Int(0), Symbol::Int(1)];
        Alphabets { x1: b(), x2: b(), y: b(), y2: b() }
    }
}

/// Finite-alphabet generalized MAC with transition law `p(y, y2 | x1, x2)`.
///
/// Immutable once built; the constructor enforces nonnegativity and unit row
/// sums.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGmac {
    alphabets: Alphabets,
    dims: [usize; 4],
    // flat, indexed [x1][x2][y][y2]
    table: Vec<f64>,
}

/// On-disk layout: `{alphabets: {x1, x2, y, y2}, transition: [x1][x2][y][y2]}`.
#[derive(Serialize, Deserialize)]
struct FiniteGmacFile {
    alphabets: Alphabets,
    transition: Vec<Vec<Vec<Vec<f64>>>>,
}

impl FiniteGmac {
    /// Builds a channel from a transition function evaluated on index tuples.
    pub fn from_fn(alphabets: Alphabets, f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let dims = [alphabets.x1.len(), alphabets.x2.len(), alphabets.y.len(), alphabets.y2.len()];
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Shape("every alphabet must be nonempty".into()));
        }
        let mut table = Vec::with_capacity(dims.iter().product());
        for x1 in 0..dims[0] {
            for x2 in 0..dims[1] {
                for y in 0..dims[2] {
                    for y2 in 0..dims[3] {
                        table.push(f(x1, x2, y, y2));
                    }
                }
            }
        }
        let ch = FiniteGmac { alphabets, dims, table };
        ch.validate()?;
        Ok(ch)
    }

    fn validate(&self) -> Result<()> {
        for x1 in 0..self.dims[0] {
            for x2 in 0..self.dims[1] {
                let row = self.row(x1, x2);
                if let Some(bad) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return domain(format!("transition entry {bad} at (x1={x1}, x2={x2}) is not a probability"));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return domain(format!("transition row (x1={x1}, x2={x2}) sums to {sum}"));
                }
            }
        }
        Ok(())
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    /// Alphabet sizes `[|X1|, |X2|, |Y|, |Y2|]`.
    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    #[inline]
    pub fn prob(&self, x1: usize, x2: usize, y: usize, y2: usize) -> f64 {
        let [_, d2, dy, dy2] = self.dims;
        self.table[((x1 * d2 + x2) * dy + y) * dy2 + y2]
    }

    /// The joint output row for one input pair, indexed `[y][y2]` flattened.
    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let [_, d2, dy, dy2] = self.dims;
        let width = dy * dy2;
        let start = (x1 * d2 + x2) * width;
        &self.table[start..start + width]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FiniteGmacFile = serde_json::from_str(text)?;
        let dims = [file.alphabets.x1.len(), file.alphabets.x2.len(), file.alphabets.y.len(), file.alphabets.y2.len()];
        let t = &file.transition;
        let shape_ok = t.len() == dims[0]
            && t.iter().all(|a| {
                a.len() == dims[1]
                    && a.iter().all(|b| b.len() == dims[2] && b.iter().all(|c| c.len() == dims[3]))
            });
        if !shape_ok {
            return Err(Error::Shape(format!(
                "transition array must be shaped [{}][{}][{}][{}] to match the alphabets",
                dims[0], dims[1], dims[2], dims[3]
            )));
        }
        FiniteGmac::from_fn(file.alphabets, |x1, x2, y, y2| t[x1][x2][y][y2])
    }

    pub fn to_json(&self) -> String {
        let [d1, d2, dy, dy2] = self.dims;
        let transition = (0..d1)
            .map(|x1| {
                (0..d2)
                    .map(|x2| (0..dy).map(|y| (0..dy2).map(|y2| self.prob(x1, x2, y, y2)).collect()).collect())
                    .collect()
            })
            .collect();
        let file = FiniteGmacFile { alphabets: self.alphabets.clone(), transition };
        serde_json::to_string(&file).expect("channel serialization is infallible")
    }

    /// Tests physical degradedness `p(y,y2|x1,x2) = p(y|x1,x2) p(y2|y,x2)`.
    ///
    /// The candidate tap law `p(y2|y,x2)` is the `p(y|x1,x2)`-weighted mean of the
    /// per-`x1` conditionals; the report carries the largest absolute error of
    /// reconstructing the joint from it.
    pub fn degradedness(&self) -> Degradedness {
        let [d1, d2, dy, dy2] = self.dims;
        let m = self.marginals();
        let mut max_violation = 0.0_f64;
        for x2 in 0..d2 {
            for y in 0..dy {
                let weight: f64 = (0..d1).map(|x1| m.p_y(x1, x2, y)).sum();
                if weight <= 0.0 {
                    continue;
                }
                let tap: Vec<f64> = (0..dy2)
                    .map(|y2| (0..d1).map(|x1| self.prob(x1, x2, y, y2)).sum::<f64>() / weight)
                    .collect();
                for x1 in 0..d1 {
                    let py = m.p_y(x1, x2, y);
                    for (y2, t) in tap.iter().enumerate() {
                        let err = (self.prob(x1, x2, y, y2) - py * t).abs();
                        max_violation = max_violation.max(err);
                    }
                }
            }
        }
        Degradedness { degraded: max_violation <= DEGRADED_TOL, max_violation }
    }

    pub fn is_degraded(&self) -> bool {
        self.degradedness().degraded
    }

    /// Marginal laws `p(y|x1,x2)` and `p(y2|x1,x2)`.
    pub fn marginals(&self) -> MarginalPair {
        let [d1, d2, dy, dy2] = self.dims;
        let mut p_y = vec![0.0; d1 * d2 * dy];
        let mut p_y2 = vec![0.0; d1 * d2 * dy2];
        for x1 in 0..d1 {
            for x2 in 0..d2 {
                let base = x1 * d2 + x2;
                for y in 0..dy {
                    for y2 in 0..dy2 {
                        let v = self.prob(x1, x2, y, y2);
                        p_y[base * dy + y] += v;
                        p_y2[base * dy2 + y2] += v;
                    }
                }
            }
        }
        MarginalPair { dims: self.dims, p_y, p_y2 }
    }
}

/// Outcome of [`FiniteGmac::degradedness`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degradedness {
    pub degraded: bool,
    pub max_violation: f64,
}

/// Marginal transition laws of a GMAC.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalPair {
    dims: [usize; 4],
    p_y: Vec<f64>,
    p_y2: Vec<f64>,
}

impl MarginalPair {
    /// `p(y | x1, x2)`
    #[inline]
    pub fn p_y(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.p_y[(x1 * self.dims[1] + x2) * self.dims[2] + y]
    }

    /// `p(y2 | x1, x2)`
    #[inline]
    pub fn p_y2(&self, x1: usize, x2: usize, y2: usize) -> f64 {
        self.p_y2[(x1 * self.dims[1] + x2) * self.dims[3] + y2]
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }
}

/// Binary multiplier MAC with a bias channel to user 2:
/// `Y = X1·X2`, `Y2 = 1` iff `X1 ≤ X2`. Not degraded.
pub fn deterministic_example() -> FiniteGmac {
    FiniteGmac::from_fn(Alphabets::binary(), |x1, x2, y, y2| {
        let out_y = x1 * x2;
        let out_y2 = usize::from(x1 <= x2);
        if y == out_y && y2 == out_y2 {
            1.0
        } else {
            0.0
        }
    })
    .expect("deterministic table is valid")
}

/// Binary multiplier MAC whose output reaches user 2 through a BSC(`p`):
/// `Y = X1·X2`, `Y2 = Y ⊕ Z2` with `Pr{Z2 = 1} = p`.
///
/// `p = 0` is accepted (user 2 sees `Y` exactly).
pub fn binary_gmac(p: f64) -> Result<FiniteGmac> {
    if !(0.0..=0.5).contains(&p) {
        return domain(format!("crossover probability {p} outside [0, 1/2]"));
    }
    FiniteGmac::from_fn(Alphabets::binary(), |x1, x2, y, y2| {
        if y != x1 * x2 {
            0.0
        } else if y2 == y {
            1.0 - p
        } else {
            p
        }
    })
}

/// Gaussian GMAC `Y = X1 + X2 + Z`, `Y2 = X1 + X2 + Z2` with
/// `Z ~ N(0, n)`, `Z2 ~ N(0, n2)` and average powers `p1`, `p2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianGmac {
    pub p1: f64,
    pub p2: f64,
    pub n: f64,
    pub n2: f64,
}

impl GaussianGmac {
    /// Requires `p1, p2 ≥ 0` and `0 < n < n2`.
    pub fn new(p1: f64, p2: f64, n: f64, n2: f64) -> Result<Self> {
        if !(p1 >= 0.0 && p1.is_finite()) || !(p2 >= 0.0 && p2.is_finite()) {
            return domain(format!("powers must be finite and nonnegative (P1={p1}, P2={p2})"));
        }
        if !(n > 0.0) {
            return domain(format!("destination noise variance must be positive, got N={n}"));
        }
        if !(n < n2) || !n2.is_finite() {
            return domain(format!("requires N < N2 (N={n}, N2={n2})"));
        }
        Ok(GaussianGmac { p1, p2, n, n2 })
    }

    /// The physically degraded channel with the same marginals:
    /// `Y2 = Y + Z'` with `Z' ~ N(0, n2 - n)`.
    pub fn degraded_equivalent(&self) -> Result<DegradedGaussianGmac> {
        if !(self.n < self.n2) {
            return domain(format!("requires N < N2 (N={}, N2={})", self.n, self.n2));
        }
        Ok(DegradedGaussianGmac { p1: self.p1, p2: self.p2, n: self.n, extra_noise: self.n2 - self.n })
    }

    /// Both marginals as (mean coefficient on `x1 + x2`, variance).
    pub fn marginal_laws(&self) -> GaussianMarginals {
        GaussianMarginals { y: (1.0, self.n), y2: (1.0, self.n2) }
    }
}

/// `Y = X1 + X2 + Z`, `Y2 = Y + Z'` with independent `Z ~ N(0, n)`,
/// `Z' ~ N(0, extra_noise)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradedGaussianGmac {
    pub p1: f64,
    pub p2: f64,
    pub n: f64,
    pub extra_noise: f64,
}

impl DegradedGaussianGmac {
    pub fn tap_variance(&self) -> f64 {
        self.n + self.extra_noise
    }

    pub fn marginal_laws(&self) -> GaussianMarginals {
        GaussianMarginals { y: (1.0, self.n), y2: (1.0, self.tap_variance()) }
    }
}

/// Conditional Gaussian marginals given `(x1, x2)`: each output is
/// `N(coef·(x1 + x2), variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMarginals {
    pub y: (f64, f64),
    pub y2: (f64, f64),
}

impl GaussianMarginals {
    pub fn max_abs_diff(&self, other: &GaussianMarginals) -> f64 {
        [
            self.y.0 - other.y.0,
            self.y.1 - other.y.1,
            self.y2.0 - other.y2.0,
            self.y2.1 - other.y2.1,
        ]
        .iter()
        .fold(0.0_f64, |m, d| m.max(d.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rows_sum(ch: &FiniteGmac) {
        let [d1, d2, ..] = ch.dims();
        for x1 in 0..d1 {
            for x2 in 0..d2 {
                let s: f64 = ch.row(x1, x2).iter().sum();
                assert!((s - 1.0).abs() <= ROW_SUM_TOL);
            }
        }
    }

    #[test]
    fn deterministic_truth_table() {
        let ch = deterministic_example();
        assert_eq!(ch.prob(1, 1, 1, 1), 1.0);
        assert_eq!(ch.prob(1, 0, 0, 0), 1.0);
        assert_eq!(ch.prob(0, 0, 0, 1), 1.0);
        assert_eq!(ch.prob(0, 1, 0, 1), 1.0);
        assert_rows_sum(&ch);
    }

    #[test]
    fn binary_gmac_entries() {
        let ch = binary_gmac(0.2).unwrap();
        assert_eq!(ch.prob(1, 1, 1, 1), 0.8);
        assert_eq!(ch.prob(1, 1, 1, 0), 0.2);
        let noiseless = binary_gmac(0.0).unwrap();
        for (x1, x2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let y = x1 * x2;
            assert_eq!(noiseless.prob(x1, x2, y, y), 1.0);
        }
        let uniform = binary_gmac(0.5).unwrap();
        assert_eq!(uniform.prob(0, 1, 0, 0), 0.5);
        assert_eq!(uniform.prob(0, 1, 0, 1), 0.5);
        assert!(binary_gmac(0.6).is_err());
        assert!(binary_gmac(-0.1).is_err());
    }

    #[test]
    fn degradedness() {
        let r = binary_gmac(0.2).unwrap().degradedness();
        assert!(r.degraded);
        assert_eq!(r.max_violation, 0.0);
        let det = deterministic_example().degradedness();
        assert!(!det.degraded);
        assert!(det.max_violation > 0.1);
        for k in 1..=50 {
            assert!(binary_gmac(k as f64 / 100.0).unwrap().is_degraded());
        }
    }

    #[test]
    fn constant_tap_is_degraded() {
        let alph = Alphabets {
            x1: vec![Symbol::Int(0), Symbol::Int(1), Symbol::Int(2)],
            x2: vec![Symbol::Int(0), Symbol::Int(1)],
            y: vec![Symbol::Int(0), Symbol::Int(1)],
            y2: vec![Symbol::Text("z".into())],
        };
        let ch = FiniteGmac::from_fn(alph, |x1, x2, y, _| {
            let q = 0.1 + 0.2 * x1 as f64 + 0.05 * x2 as f64;
            if y == 1 {
                q
            } else {
                1.0 - q
            }
        })
        .unwrap();
        assert!(ch.is_degraded());
    }

    #[test]
    fn marginal_examples() {
        let m = binary_gmac(0.2).unwrap().marginals();
        assert_eq!(m.p_y(1, 1, 1), 1.0);
        assert!((m.p_y2(1, 1, 1) - 0.8).abs() < 1e-15);
        let d = deterministic_example().marginals();
        assert_eq!(d.p_y(0, 1, 0), 1.0);
        assert_eq!(d.p_y2(0, 1, 1), 1.0);
        for x1 in 0..2 {
            for x2 in 0..2 {
                assert!(((0..2).map(|y| m.p_y(x1, x2, y)).sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(((0..2).map(|y| m.p_y2(x1, x2, y)).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_tables_rejected() {
        let bad = FiniteGmac::from_fn(Alphabets::binary(), |_, _, y, y2| if y == 0 && y2 == 0 { 0.9 } else { 0.0 });
        assert!(matches!(bad, Err(Error::Domain(_))));
        let neg = FiniteGmac::from_fn(Alphabets::binary(), |_, _, y, y2| match (y, y2) {
            (0, 0) => 1.5,
            (0, 1) => -0.5,
            _ => 0.0,
        });
        assert!(neg.is_err());
    }

    #[test]
    fn json_round_trip_and_shape_errors() {
        let ch = binary_gmac(0.2).unwrap();
        let back = FiniteGmac::from_json(&ch.to_json()).unwrap();
        assert_eq!(back, ch);
        let text = r#"{"alphabets":{"x1":[0,1],"x2":[0,1],"y":[0,1],"y2":[0]},
                       "transition":[[[[1.0],[0.0]],[[1.0],[0.0]]],[[[1.0],[0.0]]]]}"#;
        assert!(matches!(FiniteGmac::from_json(text), Err(Error::Shape(_))));
        assert!(matches!(FiniteGmac::from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn gaussian_degraded_equivalent() {
        let g = GaussianGmac::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let d = g.degraded_equivalent().unwrap();
        assert_eq!(d.extra_noise, 1.0);
        assert_eq!(d.tap_variance(), 2.0);
        assert_eq!(g.marginal_laws().max_abs_diff(&d.marginal_laws()), 0.0);

        let eps = 1e-6;
        let near = GaussianGmac::new(1.0, 1.0, 1.0, 1.0 + eps).unwrap().degraded_equivalent().unwrap();
        assert!((near.extra_noise - eps).abs() < 1e-15);

        assert!(GaussianGmac::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(GaussianGmac::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(GaussianGmac::new(-1.0, 1.0, 1.0, 2.0).is_err());
    }
}
