use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{avg_others, delta_tilde};
use crate::error::{check_budget, Error, Result};
use crate::field::VectorField;
use crate::numeric::{derived_rng, Norm};

/// `g: {-1,1}^n -> C^d`. Sign patterns are indexed by a bitmask whose bit
/// `n - 1 - j` is set iff `ε_j = +1`, so index order is lexicographic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeFunction {
    pub n: usize,
    pub dim: usize,
    pub values: Vec<Complex64>,
}

impl CubeFunction {
    pub fn new(n: usize, dim: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != (1usize << n) * dim {
            return Err(Error::DimensionMismatch { expected: (1usize << n) * dim, got: values.len() });
        }
        Ok(Self { n, dim, values })
    }

    pub fn from_fn(n: usize, dim: usize, mut g: impl FnMut(&[i64]) -> Vec<Complex64>) -> Self {
        let mut values = Vec::with_capacity((1 << n) * dim);
        for mask in 0..1usize << n {
            let v = g(&Self::signs(n, mask));
            assert_eq!(v.len(), dim, "value has wrong dimension");
            values.extend(v);
        }
        Self { n, dim, values }
    }

    pub fn signs(n: usize, mask: usize) -> Vec<i64> {
        (0..n).map(|j| if mask >> (n - 1 - j) & 1 == 1 { 1 } else { -1 }).collect()
    }

    #[inline]
    pub fn sign(&self, mask: usize, j: usize) -> f64 {
        if mask >> (self.n - 1 - j) & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn at(&self, mask: usize) -> &[Complex64] {
        &self.values[mask * self.dim..(mask + 1) * self.dim]
    }

    /// `(E_ε ‖g(ε)‖²)^{1/2}` in the given norm.
    pub fn l2_norm(&self, norm: &Norm) -> f64 {
        let count = 1usize << self.n;
        ((0..count).map(|e| norm.norm(self.at(e)).powi(2)).sum::<f64>() / count as f64).sqrt()
    }

    /// `ĝ({j}) = E_ε[g(ε)·ε_j]` for every `j`.
    pub fn degree_one_coefficients(&self) -> Vec<Vec<Complex64>> {
        let count = 1usize << self.n;
        (0..self.n)
            .map(|j| {
                let mut acc = vec![Complex64::new(0.0, 0.0); self.dim];
                for e in 0..count {
                    let s = self.sign(e, j);
                    for (a, v) in acc.iter_mut().zip(self.at(e)) {
                        *a += v * s;
                    }
                }
                acc.into_iter().map(|a| a / count as f64).collect()
            })
            .collect()
    }
}

/// `Rad g = Σ_j ĝ({j})·ε_j`.
pub fn rademacher_projection(g: &CubeFunction) -> CubeFunction {
    let coeffs = g.degree_one_coefficients();
    let count = 1usize << g.n;
    let mut values = vec![Complex64::new(0.0, 0.0); count * g.dim];
    for e in 0..count {
        for (j, c) in coeffs.iter().enumerate() {
            let s = g.sign(e, j);
            for (a, v) in values[e * g.dim..(e + 1) * g.dim].iter_mut().zip(c) {
                *a += v * s;
            }
        }
    }
    CubeFunction { n: g.n, dim: g.dim, values }
}

/// Default work cap (`m^n · 2^n · n · d`) for the identity residual.
pub const RESIDUAL_BUDGET: u128 = 1 << 28;

/// Largest deviation between `Rad_ε(f(x+ε) − f(x))` and
/// `(1/2)·Σ_j ε_j (∂̃_j E_j f)(x)` over all `x` and `ε ∈ {-1,1}^n`,
/// measured in the Euclidean norm.
pub fn rad_identity_residual(f: &VectorField) -> Result<f64> {
    rad_identity_residual_with_budget(f, RESIDUAL_BUDGET)
}

pub fn rad_identity_residual_with_budget(f: &VectorField, budget: u128) -> Result<f64> {
    let d = f.domain;
    if !d.m.is_multiple_of(2) {
        return Err(Error::OddM(d.m));
    }
    let work = (d.size() as u128) << d.n;
    check_budget(work * d.n as u128 * f.dim as u128, budget)?;
    let smoothed: Vec<VectorField> = (0..d.n)
        .map(|j| delta_tilde(&avg_others(f, j)?, j))
        .collect::<Result<_>>()?;
    let signs = d.sign_vectors();
    let shift_tables: Vec<Vec<usize>> = signs.iter().map(|e| d.shift_table(e)).collect();
    let residuals: Vec<f64> = (0..d.size())
        .into_par_iter()
        .map(|x| {
            let g = CubeFunction {
                n: d.n,
                dim: f.dim,
                values: shift_tables
                    .iter()
                    .flat_map(|t| f.at(t[x]).iter().zip(f.at(x)).map(|(a, b)| a - b))
                    .collect(),
            };
            let rad = rademacher_projection(&g);
            let mut worst = 0.0f64;
            for (e, eps) in signs.iter().enumerate() {
                let mut sq = 0.0;
                for c in 0..f.dim {
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for (j, s) in smoothed.iter().enumerate() {
                        rhs += s.at(x)[c] * eps[j] as f64;
                    }
                    sq += (rad.at(e)[c] - rhs * 0.5).norm_sqr();
                }
                worst = worst.max(sq.sqrt());
            }
            worst
        })
        .collect();
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

fn rad_ratio(g: &CubeFunction, norm: &Norm) -> f64 {
    let denom = g.l2_norm(norm);
    if denom == 0.0 {
        return 0.0;
    }
    rademacher_projection(g).l2_norm(norm) / denom
}

fn sample_cube<R: Rng>(n: usize, dim: usize, ternary: bool, rng: &mut R) -> CubeFunction {
    let values = (0..(1usize << n) * dim)
        .map(|_| {
            let re = if ternary { rng.random_range(-1i32..=1) as f64 } else { rng.sample(StandardNormal) };
            Complex64::new(re, 0.0)
        })
        .collect();
    CubeFunction { n, dim, values }
}

/// Lower bound on `‖Rad‖` acting on `L_2({-1,1}^n, ℓ_p^d)`: the best ratio
/// `‖Rad g‖/‖g‖` over `trials` sampled `g` (alternately Gaussian and
/// `{-1,0,1}`-valued), each polished by single-entry perturbations.
pub fn k_convexity_estimate(norm: &Norm, n: usize, trials: usize, seed: u64) -> Result<f64> {
    check_budget(1u128 << n.min(127), 1 << 20)?;
    if trials == 0 {
        return Err(Error::PreconditionViolation("trials must be at least 1".into()));
    }
    let dim = norm.dim;
    let best = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derived_rng(seed, t as u64);
            let mut g = sample_cube(n, dim, t % 2 == 1, &mut rng);
            let mut r = rad_ratio(&g, norm);
            for _ in 0..4 * g.values.len() {
                let i = rng.random_range(0..g.values.len());
                let old = g.values[i];
                let step: f64 = rng.sample(StandardNormal);
                g.values[i] += Complex64::new(0.5 * step, 0.0);
                let candidate = rad_ratio(&g, norm);
                if candidate > r {
                    r = candidate;
                } else {
                    g.values[i] = old;
                }
            }
            r
        })
        .collect::<Vec<f64>>();
    Ok(best.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::TorusDomain;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn projection_examples() {
        let v = [c(1.0), Complex64::new(0.0, 2.0)];
        let linear = CubeFunction::from_fn(3, 2, |e| v.iter().map(|x| x * e[0] as f64).collect());
        assert_eq!(rademacher_projection(&linear), linear);
        let constant = CubeFunction::from_fn(3, 2, |_| v.to_vec());
        assert!(rademacher_projection(&constant).values.iter().all(|z| z.norm() == 0.0));
        let quadratic = CubeFunction::from_fn(3, 2, |e| v.iter().map(|x| x * (e[0] * e[1]) as f64).collect());
        assert!(rademacher_projection(&quadratic).values.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn residual_vanishes_on_a_character() {
        let d = TorusDomain::new(2, 4).unwrap();
        let f = VectorField::character(d, &[1, 0], &[Complex64::new(0.3, -1.2)]);
        assert!(rad_identity_residual(&f).unwrap() < 1e-12);
        let constant = VectorField::constant(d, &[c(4.0)]);
        assert_eq!(rad_identity_residual(&constant).unwrap(), 0.0);
        let odd = VectorField::constant(TorusDomain::new(1, 5).unwrap(), &[c(1.0)]);
        assert_eq!(rad_identity_residual(&odd).unwrap_err(), Error::OddM(5));
    }

    #[test]
    fn residual_budget_is_enforced() {
        let d = TorusDomain::new(3, 8).unwrap();
        let f = VectorField::constant(d, &[c(1.0)]);
        assert!(matches!(rad_identity_residual_with_budget(&f, 10).unwrap_err(), Error::BudgetExceeded { .. }));
    }

    #[test]
    fn hilbert_ratio_never_exceeds_one() {
        let k = k_convexity_estimate(&Norm::l2(3), 3, 20, 5).unwrap();
        assert!(k <= 1.0 + 1e-12);
        let linear = CubeFunction::from_fn(2, 2, |e| vec![c(e[0] as f64), c(2.0 * e[1] as f64)]);
        assert!((rad_ratio(&linear, &Norm::new(1.0, 2).unwrap()) - 1.0).abs() < 1e-15);
    }
}
