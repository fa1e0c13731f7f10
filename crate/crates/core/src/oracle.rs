//! Exact finite-blocklength evaluation of explicit codes on finite GMACs.
//!
//! Messages are uniform. The destination decodes `(w0, w1)` from `yⁿ` with a
//! MAP rule; user 2 knows `w0` (hence `x2ⁿ`) and overhears `y2ⁿ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{FiniteGmac, Symbol};
use crate::entropy::entropy;
use crate::error::{domain, Error, Result};

/// Largest number of output sequence pairs `|Y|ⁿ·|Y2|ⁿ` the oracle enumerates.
pub const MAX_JOINT_OUTPUTS: u128 = 1 << 24;
/// Largest total number of weighted codewords a code may hold.
pub const MAX_CODE_ENTRIES: u128 = 1 << 22;
/// Tolerance on encoder row sums and on the perfect-secrecy test.
pub const CODE_TOL: f64 = 1e-12;
pub const SECRECY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCodeword {
    pub codeword: Vec<Symbol>,
    pub prob: f64,
}

/// A length-`n` code with a stochastic encoder for user 1 and a deterministic
/// encoder for user 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub n: usize,
    #[serde(rename = "M0")]
    pub m0: usize,
    #[serde(rename = "M1")]
    pub m1: usize,
    /// `encoder1[w0][w1]` lists the codewords `x1ⁿ` with their probabilities.
    pub encoder1: Vec<Vec<Vec<WeightedCodeword>>>,
    /// `encoder2[w0]` is `x2ⁿ`.
    pub encoder2: Vec<Vec<Symbol>>,
}

impl Codebook {
    /// Checks table shapes, codeword lengths and encoder row sums.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m0 == 0 || self.m1 == 0 {
            return Err(Error::Shape("n, M0 and M1 must be positive".into()));
        }
        if self.encoder1.len() != self.m0 || self.encoder2.len() != self.m0 {
            return Err(Error::Shape(format!("encoders need {} rows for W0", self.m0)));
        }
        for (w0, row) in self.encoder1.iter().enumerate() {
            if row.len() != self.m1 {
                return Err(Error::Shape(format!("encoder1[{w0}] needs {} entries for W1", self.m1)));
            }
            for (w1, list) in row.iter().enumerate() {
                if list.is_empty() {
                    return Err(Error::Shape(format!("encoder1[{w0}][{w1}] is empty")));
                }
                let mut total = 0.0;
                for c in list {
                    if c.codeword.len() != self.n {
                        return Err(Error::Shape(format!(
                            "codeword of length {} in encoder1[{w0}][{w1}], expected {}",
                            c.codeword.len(),
                            self.n
                        )));
                    }
                    if !(c.prob.is_finite() && c.prob >= 0.0) {
                        return domain(format!("negative or non-finite probability in encoder1[{w0}][{w1}]"));
                    }
                    total += c.prob;
                }
                if (total - 1.0).abs() > CODE_TOL {
                    return domain(format!("encoder1[{w0}][{w1}] sums to {total}"));
                }
            }
        }
        if let Some(w0) = self.encoder2.iter().position(|c| c.len() != self.n) {
            return Err(Error::Shape(format!("encoder2[{w0}] does not have length {}", self.n)));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let code: Codebook = serde_json::from_str(text)?;
        code.validate()?;
        Ok(code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("codebook serializes")
    }

    pub fn rates(&self) -> (f64, f64) {
        let n = self.n as f64;
        ((self.m0 as f64).log2() / n, (self.m1 as f64).log2() / n)
    }

    fn entries(&self) -> u128 {
        self.encoder1.iter().flatten().map(|l| l.len() as u128).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// `H(W1 | Y2ⁿ, X2ⁿ, W0)` in bits.
    pub equivocation_bits: f64,
    /// `equivocation_bits / n`.
    pub equivocation_rate: f64,
    /// Average error probability of the MAP decoder of `(W0, W1)` from `Yⁿ`.
    pub error_prob: f64,
    pub perfect_secrecy: bool,
}

fn symbol_index(alphabet: &[Symbol], s: &Symbol, which: &str) -> Result<usize> {
    alphabet
        .iter()
        .position(|a| a == s)
        .ok_or_else(|| Error::Shape(format!("symbol {s} is not in the channel's {which} alphabet")))
}

/// Output-sequence law `p(·ⁿ | x1ⁿ, x2ⁿ)` for one output of a memoryless
/// channel, as a dense vector indexed with the first symbol most significant.
fn sequence_law(x1: &[usize], x2: &[usize], dim: usize, kernel: impl Fn(usize, usize, usize) -> f64) -> Vec<f64> {
    let mut law = vec![1.0];
    for (&a, &b) in x1.iter().zip(x2) {
        let mut next = Vec::with_capacity(law.len() * dim);
        for &p in &law {
            for o in 0..dim {
                next.push(p * kernel(a, b, o));
            }
        }
        law = next;
    }
    law
}

/// Evaluates `code` on `ch` by full enumeration of the output sequences.
pub fn evaluate(code: &Codebook, ch: &FiniteGmac) -> Result<OracleReport> {
    code.validate()?;
    let [_, _, dy, dy2] = ch.dims();
    let joint = (dy as u128).checked_pow(code.n as u32).zip((dy2 as u128).checked_pow(code.n as u32));
    match joint.and_then(|(a, b)| a.checked_mul(b)) {
        Some(v) if v <= MAX_JOINT_OUTPUTS => {}
        _ => {
            return Err(Error::Resource(format!(
                "{dy}^{n}·{dy2}^{n} output sequences exceed the enumeration limit {MAX_JOINT_OUTPUTS}",
                n = code.n
            )))
        }
    }
    if code.entries() > MAX_CODE_ENTRIES {
        return Err(Error::Resource(format!("code holds more than {MAX_CODE_ENTRIES} weighted codewords")));
    }

    let alph = ch.alphabets();
    let x2: Vec<Vec<usize>> = code
        .encoder2
        .iter()
        .map(|c| c.iter().map(|s| symbol_index(&alph.x2, s, "x2")).collect())
        .collect::<Result<_>>()?;
    let x1: Vec<Vec<Vec<(Vec<usize>, f64)>>> = code
        .encoder1
        .iter()
        .map(|row| {
            row.iter()
                .map(|list| {
                    list.iter()
                        .map(|c| {
                            let idx = c.codeword.iter().map(|s| symbol_index(&alph.x1, s, "x1")).collect::<Result<_>>()?;
                            Ok((idx, c.prob))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let m = ch.marginals();
    let (m0, m1) = (code.m0, code.m1);
    let pw1 = 1.0 / m1 as f64;

    // per w0: H(W1 | Y2ⁿ, W0 = w0) and the laws p(yⁿ | w0, w1)
    let branches: Vec<(f64, Vec<Vec<f64>>)> = (0..m0)
        .into_par_iter()
        .map(|w0| {
            let mut tap = Vec::with_capacity(m1);
            let mut dest = Vec::with_capacity(m1);
            for cws in &x1[w0] {
                let mut ly2 = vec![0.0; dy2.pow(code.n as u32)];
                let mut ly = vec![0.0; dy.pow(code.n as u32)];
                for (cw, prob) in cws {
                    if *prob == 0.0 {
                        continue;
                    }
                    let a = sequence_law(cw, &x2[w0], dy2, |u, v, o| m.p_y2(u, v, o));
                    ly2.iter_mut().zip(&a).for_each(|(acc, v)| *acc += prob * v);
                    let b = sequence_law(cw, &x2[w0], dy, |u, v, o| m.p_y(u, v, o));
                    ly.iter_mut().zip(&b).for_each(|(acc, v)| *acc += prob * v);
                }
                tap.push(ly2);
                dest.push(ly);
            }
            // H(W1, Y2ⁿ) - H(Y2ⁿ) given w0
            let pair: Vec<f64> = tap.iter().flat_map(|l| l.iter().map(|v| v * pw1)).collect();
            let marginal: Vec<f64> = (0..tap[0].len()).map(|y| tap.iter().map(|l| l[y] * pw1).sum()).collect();
            let h = (entropy(&pair) - entropy(&marginal)).max(0.0);
            (h, dest)
        })
        .collect();

    let equivocation_bits = (branches.iter().map(|b| b.0).sum::<f64>() / m0 as f64).min((m1 as f64).log2());

    // MAP: correct-decoding mass is Σ_y max_w p(w, y)
    let outputs = branches[0].1[0].len();
    let pw = 1.0 / (m0 * m1) as f64;
    let correct: f64 = (0..outputs)
        .into_par_iter()
        .map(|y| {
            branches
                .iter()
                .flat_map(|b| b.1.iter().map(move |l| l[y]))
                .fold(0.0, f64::max)
                * pw
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let error_prob = (1.0 - correct).clamp(0.0, 1.0);

    Ok(OracleReport {
        equivocation_bits,
        equivocation_rate: equivocation_bits / code.n as f64,
        error_prob,
        perfect_secrecy: equivocation_bits >= (m1 as f64).log2() - SECRECY_TOL,
    })
}

/// MAP decision for one destination output sequence, ties to the lowest
/// message index `w0·M1 + w1`.
pub fn map_decode(code: &Codebook, ch: &FiniteGmac, y: &[Symbol]) -> Result<(usize, usize)> {
    code.validate()?;
    if y.len() != code.n {
        return Err(Error::Shape(format!("output sequence of length {}, expected {}", y.len(), code.n)));
    }
    let alph = ch.alphabets();
    let m = ch.marginals();
    let y: Vec<usize> = y.iter().map(|s| symbol_index(&alph.y, s, "y")).collect::<Result<_>>()?;
    let mut best = (f64::NEG_INFINITY, (0, 0));
    for w0 in 0..code.m0 {
        let x2: Vec<usize> = code.encoder2[w0].iter().map(|s| symbol_index(&alph.x2, s, "x2")).collect::<Result<_>>()?;
        for w1 in 0..code.m1 {
            let mut like = 0.0;
            for c in &code.encoder1[w0][w1] {
                let x1: Vec<usize> = c.codeword.iter().map(|s| symbol_index(&alph.x1, s, "x1")).collect::<Result<_>>()?;
                like += c.prob * (0..code.n).map(|i| m.p_y(x1[i], x2[i], y[i])).product::<f64>();
            }
            if like > best.0 {
                best = (like, (w0, w1));
            }
        }
    }
    Ok(best.1)
}

/// Block-wise concatenation: the message of the result is the tuple of block
/// messages, indexed with the first block most significant, and each block is
/// encoded independently by its own code.
pub fn concatenate(codes: &[Codebook]) -> Result<Codebook> {
    let first = codes.first().ok_or_else(|| Error::Shape("nothing to concatenate".into()))?;
    for c in codes {
        c.validate()?;
    }
    let mut m0: u128 = 1;
    let mut m1: u128 = 1;
    let mut entries: u128 = 1;
    for c in codes {
        m0 = m0.saturating_mul(c.m0 as u128);
        m1 = m1.saturating_mul(c.m1 as u128);
        let widest = c.encoder1.iter().flatten().map(|l| l.len()).max().unwrap_or(1) as u128;
        entries = entries.saturating_mul(widest);
    }
    if m0.saturating_mul(m1).saturating_mul(entries) > MAX_CODE_ENTRIES {
        return Err(Error::Resource(format!("concatenated code would exceed {MAX_CODE_ENTRIES} weighted codewords")));
    }
    let mut acc = first.clone();
    for next in &codes[1..] {
        acc = concat_pair(&acc, next);
    }
    Ok(acc)
}

fn concat_pair(a: &Codebook, b: &Codebook) -> Codebook {
    let m0 = a.m0 * b.m0;
    let m1 = a.m1 * b.m1;
    let mut encoder1 = Vec::with_capacity(m0);
    let mut encoder2 = Vec::with_capacity(m0);
    for u0 in 0..a.m0 {
        for v0 in 0..b.m0 {
            let mut row = Vec::with_capacity(m1);
            for u1 in 0..a.m1 {
                for v1 in 0..b.m1 {
                    let list = a.encoder1[u0][u1]
                        .iter()
                        .flat_map(|p| {
                            b.encoder1[v0][v1].iter().map(move |q| WeightedCodeword {
                                codeword: p.codeword.iter().chain(&q.codeword).cloned().collect(),
                                prob: p.prob * q.prob,
                            })
                        })
                        .collect();
                    row.push(list);
                }
            }
            encoder1.push(row);
            encoder2.push(a.encoder2[u0].iter().chain(&b.encoder2[v0]).cloned().collect());
        }
    }
    Codebook { n: a.n + b.n, m0, m1, encoder1, encoder2 }
}

/// `k` independent uses of `code` over the product message set.
pub fn repeat_code(code: &Codebook, k: usize) -> Result<Codebook> {
    if k == 0 {
        return domain("repetition count must be at least 1");
    }
    concatenate(&vec![code.clone(); k])
}

fn bit(v: usize) -> Symbol {
    Symbol::Int(v as i64)
}

/// One-symbol code for the deterministic example that sends a private bit
/// with `x2 = 1`; user 2 always observes `y2 = 1`.
pub fn deterministic_private_corner_code() -> Codebook {
    Codebook {
        n: 1,
        m0: 1,
        m1: 2,
        encoder1: vec![(0..2).map(|w1| vec![WeightedCodeword { codeword: vec![bit(w1)], prob: 1.0 }]).collect()],
        encoder2: vec![vec![bit(1)]],
    }
}

/// One-symbol code for the deterministic example that sends a common bit on
/// `x2` with `x1 = 1`.
pub fn deterministic_common_corner_code() -> Codebook {
    Codebook {
        n: 1,
        m0: 2,
        m1: 1,
        encoder1: (0..2).map(|_| vec![vec![WeightedCodeword { codeword: vec![bit(1)], prob: 1.0 }]]).collect(),
        encoder2: (0..2).map(|w0| vec![bit(w0)]).collect(),
    }
}

/// Parameters of [`random_superposition_code`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionParams {
    pub alpha: f64,
    pub n: usize,
    pub m0: usize,
    pub m1: usize,
    pub aux_bins: usize,
    pub seed: u64,
}

const CLOUD_STREAM: u64 = 0;
const SATELLITE_STREAM: u64 = 1;

/// Random binary superposition code: cloud centers `qⁿ(w0)` uniform,
/// satellites `x'ⁿ(w1, b)` i.i.d. Bernoulli(`alpha`), `x1ⁿ = qⁿ ⊕ x'ⁿ` with the
/// bin `b` drawn uniformly by the encoder, and `x2ⁿ = 1ⁿ`.
///
/// Clouds and satellites come from separate streams of the seeded generator,
/// so changing `M1` or `aux_bins` leaves the clouds unchanged.
pub fn random_superposition_code(params: &SuperpositionParams) -> Result<Codebook> {
    let SuperpositionParams { alpha, n, m0, m1, aux_bins, seed } = *params;
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha {alpha} outside [0, 1]"));
    }
    if n == 0 || m0 == 0 || m1 == 0 || aux_bins == 0 {
        return domain("n, M0, M1 and aux_bins must be positive");
    }
    if (m0 as u128) * (m1 as u128) * (aux_bins as u128) > MAX_CODE_ENTRIES {
        return Err(Error::Resource(format!("M0·M1·aux_bins exceeds {MAX_CODE_ENTRIES}")));
    }
    let mut clouds_rng = ChaCha8Rng::seed_from_u64(seed);
    clouds_rng.set_stream(CLOUD_STREAM);
    let mut sat_rng = ChaCha8Rng::seed_from_u64(seed);
    sat_rng.set_stream(SATELLITE_STREAM);

    let clouds: Vec<Vec<usize>> = (0..m0).map(|_| (0..n).map(|_| usize::from(clouds_rng.gen::<bool>())).collect()).collect();
    let satellites: Vec<Vec<Vec<usize>>> = (0..m1)
        .map(|_| (0..aux_bins).map(|_| (0..n).map(|_| usize::from(sat_rng.gen::<f64>() < alpha)).collect()).collect())
        .collect();

    let prob = 1.0 / aux_bins as f64;
    let encoder1 = clouds
        .iter()
        .map(|q| {
            satellites
                .iter()
                .map(|bins| {
                    bins.iter()
                        .map(|s| WeightedCodeword { codeword: q.iter().zip(s).map(|(a, b)| bit(a ^ b)).collect(), prob })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(Codebook { n, m0, m1, encoder1, encoder2: vec![vec![bit(1); n]; m0] })
}
