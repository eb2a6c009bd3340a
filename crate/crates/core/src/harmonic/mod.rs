//! Characters of `Z_m^n` and `{-1,1}^n`, the vector-valued Fourier
//! transform, the diagonal difference/averaging operators and the
//! Rademacher projection.

mod cube;
mod fourier;

pub use cube::{k_convexity_estimate, rad_identity_residual, rad_identity_residual_with_budget, rademacher_projection, CubeFunction};
pub use fourier::{
    apply_symbol, fourier_forward, fourier_forward_direct, fourier_forward_fast, fourier_inverse,
    fourier_inverse_direct, fourier_inverse_fast, SpectralCoefficients, DIRECT_TRANSFORM_LIMIT,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::metric::TorusDomain;

/// `exp(2πi s/m)`, exact at multiples of a quarter turn.
pub fn root_of_unity(s: i64, m: usize) -> Complex64 {
    let m_i = m as i64;
    let s = s.rem_euclid(m_i);
    if (4 * s) % m_i == 0 {
        return match 4 * s / m_i {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * s as f64 / m as f64)
}

fn phase(k: &[usize], x: &[usize], m: usize) -> i64 {
    (k.iter().zip(x).map(|(a, b)| (a % m) * (b % m) % m).sum::<usize>() % m) as i64
}

/// `W_k(x) = exp((2πi/m) Σ_j k_j x_j)`.
pub fn walsh_char(k: &[usize], x: &[usize], domain: &TorusDomain) -> Complex64 {
    root_of_unity(phase(k, x, domain.m), domain.m)
}

/// `W_k` at a shift vector with possibly negative entries.
pub fn walsh_char_signed(k: &[usize], eps: &[i64], m: usize) -> Complex64 {
    let s: i64 = k.iter().zip(eps).map(|(&a, &e)| a as i64 * e).sum();
    root_of_unity(s, m)
}

/// Symbol of `∂̃_j`: `2i·sin(2πk_j/m)`.
pub fn delta_tilde_symbol(k: &[usize], j: usize, m: usize) -> Complex64 {
    let w = root_of_unity(k[j] as i64, m);
    Complex64::new(0.0, 2.0 * w.im)
}

/// Symbol of `E_j`: `Π_{ℓ≠j} cos(2πk_ℓ/m)`.
pub fn avg_others_symbol(k: &[usize], j: usize, m: usize) -> f64 {
    k.iter()
        .enumerate()
        .filter(|&(l, _)| l != j)
        .map(|(_, &kl)| root_of_unity(kl as i64, m).re)
        .product()
}

/// Symbol of `∂_ε`: `W_k(ε) − 1`.
pub fn edge_diff_symbol(k: &[usize], eps: &[i64], m: usize) -> Complex64 {
    walsh_char_signed(k, eps, m) - 1.0
}

pub(crate) fn check_axis(j: usize, domain: &TorusDomain) -> Result<()> {
    if j >= domain.n {
        return Err(Error::IndexOutOfRange { index: j, size: domain.n });
    }
    Ok(())
}

/// `∂̃_j f(x) = f(x + e_j) − f(x − e_j)`; axes are 0-based.
pub fn delta_tilde(f: &VectorField, j: usize) -> Result<VectorField> {
    check_axis(j, &f.domain)?;
    Ok(f.translate(&f.domain.axis(j, 1)).sub(&f.translate(&f.domain.axis(j, -1))))
}

/// `E_j f(x)`: the average of `f(x + Σ_{ℓ≠j} ε_ℓ e_ℓ)` over signs.
pub fn avg_others(f: &VectorField, j: usize) -> Result<VectorField> {
    check_axis(j, &f.domain)?;
    let d = f.domain;
    let patterns: Vec<Vec<i64>> = crate::metric::sign_vectors(d.n - 1)
        .into_iter()
        .map(|mut v| {
            v.insert(j, 0);
            v
        })
        .collect();
    let weight = 1.0 / patterns.len() as f64;
    let tables: Vec<Vec<usize>> = patterns.iter().map(|p| d.shift_table(p)).collect();
    let mut out = VectorField::zeros(d, f.dim);
    for x in 0..d.size() {
        let acc = out.at_mut(x);
        for t in &tables {
            for (a, v) in acc.iter_mut().zip(f.at(t[x])) {
                *a += v;
            }
        }
        for a in acc.iter_mut() {
            *a *= weight;
        }
    }
    Ok(out)
}

/// `∂_ε f(x) = f(x + ε) − f(x)` for `ε ∈ {-1, 0, 1}^n`.
pub fn edge_diff(f: &VectorField, eps: &[i64]) -> Result<VectorField> {
    if eps.len() != f.domain.n {
        return Err(Error::DimensionMismatch { expected: f.domain.n, got: eps.len() });
    }
    if eps.iter().any(|e| e.abs() > 1) {
        return Err(Error::PreconditionViolation(format!("shift {eps:?} is not in {{-1,0,1}}^n")));
    }
    Ok(f.translate(eps).sub(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::derived_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn character_values() {
        let d = TorusDomain::new(1, 4).unwrap();
        assert_eq!(walsh_char(&[1], &[1], &d), c(0.0, 1.0));
        let d3 = TorusDomain::new(3, 6).unwrap();
        for x in 0..d3.size() {
            assert_eq!(walsh_char(&[0, 0, 0], &d3.coords(x), &d3), c(1.0, 0.0));
        }
    }

    #[test]
    fn characters_are_orthonormal() {
        let d = TorusDomain::new(2, 6).unwrap();
        let size = d.size();
        for k in 0..size {
            for l in 0..size {
                let (kk, ll) = (d.coords(k), d.coords(l));
                let s: Complex64 = (0..size)
                    .map(|x| {
                        let xc = d.coords(x);
                        walsh_char(&kk, &xc, &d) * walsh_char(&ll, &xc, &d).conj()
                    })
                    .sum::<Complex64>()
                    / size as f64;
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!((s - expect).norm() < 1e-12, "k={kk:?} l={ll:?}");
            }
        }
    }

    #[test]
    fn delta_tilde_on_characters() {
        let d = TorusDomain::new(2, 4).unwrap();
        let v = [c(1.0, -2.0)];
        let f = VectorField::character(d, &[1, 3], &v);
        let g = delta_tilde(&f, 0).unwrap();
        assert!(g.max_dist(&f.scaled(c(0.0, 2.0))) < 1e-14);
        let f2 = VectorField::character(d, &[2, 1], &v);
        assert!(delta_tilde(&f2, 0).unwrap().scale() < 1e-14);
        let constant = VectorField::constant(d, &v);
        assert_eq!(delta_tilde(&constant, 1).unwrap().scale(), 0.0);
    }

    #[test]
    fn avg_others_examples() {
        let d1 = TorusDomain::new(1, 6).unwrap();
        let f = VectorField::gaussian(d1, 2, &mut derived_rng(1, 0));
        assert_eq!(avg_others(&f, 0).unwrap(), f);
        let d = TorusDomain::new(3, 8).unwrap();
        let g = VectorField::character(d, &[1, 2, 5], &[c(1.0, 0.0)]);
        assert!(avg_others(&g, 0).unwrap().scale() < 1e-14);
    }

    #[test]
    fn edge_diff_examples() {
        let d = TorusDomain::new(2, 6).unwrap();
        let f = VectorField::gaussian(d, 1, &mut derived_rng(2, 0));
        assert_eq!(edge_diff(&f, &[0, 0]).unwrap().scale(), 0.0);
        let k = [1, 4];
        let w = VectorField::character(d, &k, &[c(0.5, 1.0)]);
        let eps = [1, -1];
        let lhs = edge_diff(&w, &eps).unwrap();
        assert!(lhs.max_dist(&w.scaled(edge_diff_symbol(&k, &eps, 6))) < 1e-14);
        assert!(edge_diff(&f, &[2, 0]).is_err());
    }

    #[test]
    fn operators_match_their_symbols() {
        let mut rng = derived_rng(3, 0);
        for (n, m) in [(1, 4), (2, 4), (2, 6), (3, 4)] {
            let d = TorusDomain::new(n, m).unwrap();
            let f = VectorField::gaussian(d, 2, &mut rng);
            for j in 0..n {
                let direct = delta_tilde(&f, j).unwrap();
                let spectral = apply_symbol(&f, |k| delta_tilde_symbol(k, j, m));
                assert!(direct.max_dist(&spectral) < 1e-10);
                let direct = avg_others(&f, j).unwrap();
                let spectral = apply_symbol(&f, |k| avg_others_symbol(k, j, m).into());
                assert!(direct.max_dist(&spectral) < 1e-10);
            }
            for eps in d.ternary_vectors() {
                let direct = edge_diff(&f, &eps).unwrap();
                let spectral = apply_symbol(&f, |k| edge_diff_symbol(k, &eps, m));
                assert!(direct.max_dist(&spectral) < 1e-10);
            }
        }
    }

    #[test]
    fn smoothing_commutes_with_difference() {
        let d = TorusDomain::new(3, 6).unwrap();
        let f = VectorField::gaussian(d, 1, &mut derived_rng(4, 0));
        for j in 0..3 {
            let a = delta_tilde(&avg_others(&f, j).unwrap(), j).unwrap();
            let b = avg_others(&delta_tilde(&f, j).unwrap(), j).unwrap();
            assert!(a.max_dist(&b) < 1e-12);
        }
    }
}
