use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Metric;
use crate::error::{check_budget, Error, Result};

/// Largest point count the diagonal-graph BFS will explore.
pub const DIAG_BFS_BUDGET: usize = 1_000_000;

/// Default cap on `m^n` for any dense table over the torus.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 24;

/// The discrete torus `Z_m^n` with the `ℓ_∞` quotient metric.
///
/// Points are linearized 0-based in row-major order with the last
/// coordinate varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusDomain {
    pub n: usize,
    pub m: usize,
}

impl TorusDomain {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Self::with_budget(n, m, DEFAULT_POINT_BUDGET)
    }

    pub fn with_budget(n: usize, m: usize, budget: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::PreconditionViolation(format!(
                "torus needs n >= 1 and m >= 1, got n = {n}, m = {m}"
            )));
        }
        let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        check_budget(size, budget as u128)?;
        Ok(Self { n, m })
    }

    /// `Z_m^n` with `m` required even.
    pub fn even(n: usize, m: usize) -> Result<Self> {
        if !m.is_multiple_of(2) {
            return Err(Error::OddM(m));
        }
        Self::new(n, m)
    }

    pub fn size(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for c in out.iter_mut().rev() {
            *c = idx % self.m;
            idx /= self.m;
        }
        out
    }

    /// Linear index of a point; coordinates are reduced mod `m`.
    pub fn index_of(&self, coords: &[i64]) -> usize {
        debug_assert_eq!(coords.len(), self.n);
        let m = self.m as i64;
        coords.iter().fold(0usize, |acc, &c| acc * self.m + c.rem_euclid(m) as usize)
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0usize, |acc, &c| acc * self.m + c % self.m)
    }

    /// `idx + delta` in the group.
    pub fn shift(&self, idx: usize, delta: &[i64]) -> usize {
        let m = self.m as i64;
        let mut stride = 1usize;
        let mut rest = idx;
        let mut out = 0usize;
        for j in (0..self.n).rev() {
            let c = (rest % self.m) as i64;
            rest /= self.m;
            out += ((c + delta[j]).rem_euclid(m) as usize) * stride;
            stride *= self.m;
        }
        out
    }

    /// Table of `x + delta` for every linear index `x`.
    pub fn shift_table(&self, delta: &[i64]) -> Vec<usize> {
        (0..self.size()).map(|x| self.shift(x, delta)).collect()
    }

    /// `r e_j` as a shift vector.
    pub fn axis(&self, j: usize, r: i64) -> Vec<i64> {
        let mut v = vec![0; self.n];
        v[j] = r;
        v
    }

    pub fn distance_idx(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut best = 0;
        for _ in 0..self.n {
            let d = (a % self.m).abs_diff(b % self.m);
            best = best.max(d.min(self.m - d));
            a /= self.m;
            b /= self.m;
        }
        best
    }

    /// `{-1, 1}^n` as shift vectors, in lexicographic order with `-1 < 1`.
    pub fn sign_vectors(&self) -> Vec<Vec<i64>> {
        sign_vectors(self.n)
    }

    /// `{-1, 0, 1}^n` as shift vectors, in lexicographic order.
    pub fn ternary_vectors(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..self.n {
            out = out
                .into_iter()
                .flat_map(|v| {
                    [-1i64, 0, 1].into_iter().map(move |s| {
                        let mut w = v.clone();
                        w.push(s);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

/// `{-1, 1}^n` in lexicographic order with `-1 < 1`.
pub fn sign_vectors(n: usize) -> Vec<Vec<i64>> {
    (0..1usize << n)
        .map(|mask| (0..n).map(|j| if mask >> (n - 1 - j) & 1 == 1 { 1 } else { -1 }).collect())
        .collect()
}

impl Metric for TorusDomain {
    fn len(&self) -> usize {
        self.size()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.distance_idx(i, j) as f64
    }
}

fn check_point(x: &[i64], n: usize, m: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    for &c in x {
        if c < 0 || c as usize >= m {
            return Err(Error::CoordinateOutOfRange { value: c, modulus: m });
        }
    }
    Ok(())
}

/// `max_j min(|x_j - y_j|, m - |x_j - y_j|)`.
pub fn torus_distance(x: &[i64], y: &[i64], domain: &TorusDomain) -> Result<u64> {
    check_point(x, domain.n, domain.m)?;
    check_point(y, domain.n, domain.m)?;
    let m = domain.m as u64;
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a.abs_diff(*b);
            d.min(m - d)
        })
        .max()
        .unwrap_or(0))
}

/// `ℓ_p` distance between integer points; `p = ∞` is the max norm.
pub fn grid_distance(x: &[i64], y: &[i64], p: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidNorm(format!("p = {p}")));
    }
    let diffs = x.iter().zip(y).map(|(a, b)| a.abs_diff(*b) as f64);
    Ok(if p.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else if p == 1.0 {
        diffs.sum()
    } else if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
    })
}

/// Shortest-path distance in the graph on `Z_m^n` whose edges are the
/// full-diagonal steps `x ~ x + ε`, `ε ∈ {-1, 1}^n`.
pub fn diag_distance(x: &[i64], y: &[i64], domain: &TorusDomain) -> Result<u64> {
    check_point(x, domain.n, domain.m)?;
    check_point(y, domain.n, domain.m)?;
    check_budget(domain.size() as u128, DIAG_BFS_BUDGET as u128)?;
    let src = domain.index_of(x);
    let dst = domain.index_of(y);
    if src == dst {
        return Ok(0);
    }
    let steps = domain.sign_vectors();
    let mut seen = vec![u64::MAX; domain.size()];
    seen[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = seen[v];
        for s in &steps {
            let w = domain.shift(v, s);
            if seen[w] == u64::MAX {
                seen[w] = d + 1;
                if w == dst {
                    return Ok(d + 1);
                }
                queue.push_back(w);
            }
        }
    }
    Err(Error::Unreachable)
}

/// The grid `{0, ..., m}^n` under the `ℓ_p` metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpace {
    pub n: usize,
    pub m: usize,
    pub p: f64,
}

impl GridSpace {
    pub fn new(n: usize, m: usize, p: f64) -> Self {
        Self { n, m, p }
    }

    pub fn coords(&self, mut idx: usize) -> Vec<i64> {
        let side = self.m + 1;
        let mut out = vec![0; self.n];
        for c in out.iter_mut().rev() {
            *c = (idx % side) as i64;
            idx /= side;
        }
        out
    }

    pub fn index(&self, coords: &[i64]) -> usize {
        coords.iter().fold(0usize, |acc, &c| acc * (self.m + 1) + c as usize)
    }
}

impl Metric for GridSpace {
    fn len(&self) -> usize {
        (self.m + 1).pow(self.n as u32)
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        grid_distance(&self.coords(i), &self.coords(j), self.p).expect("same dimension")
    }
}
