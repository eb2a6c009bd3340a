//! Small numeric helpers shared by the evaluators: order-independent
//! summation, finite-dimensional complex norms and seed derivation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairwise (tree) summation. The result depends only on the order of the
/// slice, never on how callers scheduled the work that produced it.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    pairwise_sum(values) / values.len() as f64
}

/// The `ℓ_p^d` norm over complex coordinates. `p = ∞` is the max norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norm {
    pub p: f64,
    pub dim: usize,
}

impl Norm {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        if !(p >= 1.0) || dim == 0 {
            return Err(Error::InvalidNorm(format!("lp:{p}:{dim}")));
        }
        Ok(Self { p, dim })
    }

    pub fn l2(dim: usize) -> Self {
        Self { p: 2.0, dim }
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }

    pub fn norm(&self, v: &[Complex64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim);
        if self.p.is_infinite() {
            v.iter().map(|z| z.norm()).fold(0.0, f64::max)
        } else if self.p == 2.0 {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        } else if self.p == 1.0 {
            v.iter().map(|z| z.norm()).sum()
        } else {
            v.iter().map(|z| z.norm().powf(self.p)).sum::<f64>().powf(1.0 / self.p)
        }
    }

    pub fn dist(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        if self.p.is_infinite() {
            a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        } else if self.p == 2.0 {
            a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
        } else if self.p == 1.0 {
            a.iter().zip(b).map(|(x, y)| (x - y).norm()).sum()
        } else {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm().powf(self.p))
                .sum::<f64>()
                .powf(1.0 / self.p)
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_infinite() {
            write!(f, "lp:inf:{}", self.dim)
        } else {
            write!(f, "lp:{}:{}", self.p, self.dim)
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    /// Parses `lp:<p>:<d>`, with `<p>` a real `>= 1` or `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidNorm(s.to_string());
        let mut parts = s.split(':');
        if parts.next() != Some("lp") {
            return Err(bad());
        }
        let p = match parts.next().ok_or_else(bad)? {
            "inf" | "infty" | "infinity" => f64::INFINITY,
            other => other.parse::<f64>().map_err(|_| bad())?,
        };
        let dim = parts.next().ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Norm::new(p, dim)
    }
}

/// `x^p` with the `p = 1` and `p = 2` cases kept exact.
#[inline]
pub fn powp(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else if p == 1.0 {
        x
    } else {
        x.powf(p)
    }
}

/// Stream-splitting for parallel work: restart `i` of a run seeded with
/// `seed` always draws from the same generator regardless of thread count.
pub fn derived_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
