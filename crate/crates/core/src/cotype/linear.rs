use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_even, cotype_functionals, CotypeOptions};
use crate::error::{check_budget, Error, Result};
use crate::field::{NormedField, VectorField};
use crate::harmonic::root_of_unity;
use crate::metric::{sign_vectors, TorusDomain};
use crate::numeric::{pairwise_mean, powp, Norm};

/// Most vectors accepted by the exact sign enumeration.
pub const MAX_SIGN_VECTORS: usize = 20;

fn check_vectors(vectors: &[Vec<Complex64>], norm: &Norm) -> Result<()> {
    check_budget(vectors.len() as u128, MAX_SIGN_VECTORS as u128)?;
    if vectors.is_empty() {
        return Err(Error::PreconditionViolation("at least one vector is required".into()));
    }
    for v in vectors {
        if v.len() != norm.dim {
            return Err(Error::DimensionMismatch { expected: norm.dim, got: v.len() });
        }
    }
    Ok(())
}

/// `E_ε ‖Σ_j ε_j x_j‖^p` by enumerating all `2^n` signs.
pub fn rademacher_average(vectors: &[Vec<Complex64>], p: f64, norm: &Norm) -> Result<f64> {
    check_vectors(vectors, norm)?;
    let values: Vec<f64> = sign_vectors(vectors.len())
        .iter()
        .map(|eps| {
            let mut sum = vec![Complex64::new(0.0, 0.0); norm.dim];
            for (e, v) in eps.iter().zip(vectors) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x * *e as f64;
                }
            }
            powp(norm.norm(&sum), p)
        })
        .collect();
    Ok(pairwise_mean(&values))
}

/// `(Σ_j ‖x_j‖^q)^{1/q} / (E_ε ‖Σ_j ε_j x_j‖^p)^{1/p}`: the smallest constant
/// for which these vectors satisfy the Rademacher cotype inequality.
pub fn rademacher_cotype_ratio(vectors: &[Vec<Complex64>], p: f64, q: f64, norm: &Norm) -> Result<f64> {
    super::check_exponents(p, q)?;
    let avg = rademacher_average(vectors, p, norm)?;
    if avg == 0.0 {
        return Err(Error::PreconditionViolation("all vectors vanish".into()));
    }
    let top: f64 = vectors.iter().map(|v| powp(norm.norm(v), q)).sum();
    Ok(top.powf(1.0 / q) / avg.powf(1.0 / p))
}

/// `f(x) = Σ_j e^{2πi x_j/m} v_j` on `Z_m^n`, `n` the number of vectors.
pub fn linear_exponential_witness(vectors: &[Vec<Complex64>], m: usize) -> Result<VectorField> {
    check_even(m)?;
    let dim = vectors.first().map(|v| v.len()).ok_or_else(|| Error::PreconditionViolation("no vectors".into()))?;
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    let domain = TorusDomain::new(vectors.len(), m)?;
    Ok(VectorField::from_fn(domain, dim, |x| {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (xj, v) in x.iter().zip(vectors) {
            let w = root_of_unity(*xj as i64, m);
            for (o, c) in out.iter_mut().zip(v) {
                *o += w * c;
            }
        }
        out
    }))
}

/// Measured sides of the cotype inequality for the linear exponential
/// witness next to their closed-form values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearExponentialCheck {
    pub lhs: f64,
    /// `2^p Σ_j ‖v_j‖^p`.
    pub lhs_closed_form: f64,
    pub rhs_raw: f64,
    /// `(4π/m)^p E_ε ‖Σ_j ε_j v_j‖^p`.
    pub rhs_bound: f64,
    pub gamma_hat: f64,
    /// Rademacher cotype ratio of the vectors at `(p, p)`.
    pub rademacher_ratio: f64,
}

impl LinearExponentialCheck {
    pub fn evaluate(vectors: &[Vec<Complex64>], m: usize, p: f64, norm: &Norm) -> Result<Self> {
        check_vectors(vectors, norm)?;
        let f = linear_exponential_witness(vectors, m)?;
        let report = cotype_functionals(&NormedField::new(&f, *norm)?, p, p, CotypeOptions::default())?;
        let lhs_closed_form = powp(2.0, p) * vectors.iter().map(|v| powp(norm.norm(v), p)).sum::<f64>();
        let rhs_bound = powp(4.0 * PI / m as f64, p) * rademacher_average(vectors, p, norm)?;
        Ok(Self {
            lhs: report.lhs,
            lhs_closed_form,
            rhs_raw: report.rhs_raw,
            rhs_bound,
            gamma_hat: report.gamma_hat,
            rademacher_ratio: rademacher_cotype_ratio(vectors, p, p, norm)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(d: usize, i: usize) -> Vec<Complex64> {
        (0..d).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn ratio_examples() {
        let l2 = Norm::l2(3);
        let e: Vec<_> = (0..3).map(|i| basis(3, i)).collect();
        assert!((rademacher_cotype_ratio(&e, 2.0, 2.0, &l2).unwrap() - 1.0).abs() < 1e-15);
        let linf = Norm::new(f64::INFINITY, 2).unwrap();
        let e2: Vec<_> = (0..2).map(|i| basis(2, i)).collect();
        assert!((rademacher_cotype_ratio(&e2, 2.0, 2.0, &linf).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let single = vec![vec![Complex64::new(3.0, 4.0), Complex64::new(1.0, 0.0)]];
        for p in [1.0, 2.0, 3.5] {
            let norm = Norm::new(p, 2).unwrap();
            assert!((rademacher_cotype_ratio(&single, p, p, &norm).unwrap() - 1.0).abs() < 1e-14);
        }
        let many = vec![basis(1, 0); 21];
        assert!(matches!(rademacher_cotype_ratio(&many, 2.0, 2.0, &Norm::l2(1)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn single_unit_vector_on_z4() {
        let v = vec![basis(1, 0)];
        let c = LinearExponentialCheck::evaluate(&v, 4, 2.0, &Norm::l2(1)).unwrap();
        assert!((c.lhs - 4.0).abs() < 1e-14);
        assert_eq!(c.lhs_closed_form, 4.0);
    }

    #[test]
    fn odd_modulus_rejected() {
        assert_eq!(linear_exponential_witness(&[basis(1, 0)], 5).unwrap_err(), Error::OddM(5));
    }
}
