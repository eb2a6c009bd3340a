use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::root_of_unity;
use crate::field::VectorField;
use crate::metric::TorusDomain;

/// Largest `m^n` transformed by direct summation.
pub const DIRECT_TRANSFORM_LIMIT: usize = 4096;

/// `f̂(k)` for every `k ∈ Z_m^n`, stored `coeffs[k * dim + c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    pub domain: TorusDomain,
    pub dim: usize,
    pub coeffs: Vec<Complex64>,
}

impl SpectralCoefficients {
    pub fn at(&self, k: usize) -> &[Complex64] {
        &self.coeffs[k * self.dim..(k + 1) * self.dim]
    }

    /// `Σ_k ‖f̂(k)‖²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Debug dump `{"k": [...], "re": [...], "im": [...]}`, one entry per `k`.
    pub fn to_json_string(&self) -> String {
        let size = self.domain.size();
        let k: Vec<Vec<usize>> = (0..size).map(|i| self.domain.coords(i)).collect();
        let re: Vec<Vec<f64>> = (0..size).map(|i| self.at(i).iter().map(|z| z.re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..size).map(|i| self.at(i).iter().map(|z| z.im).collect()).collect();
        json!({ "k": k, "re": re, "im": im }).to_string()
    }
}

/// Direct summation over all `(k, x)` pairs; `sign` is the exponent sign.
fn direct(domain: TorusDomain, dim: usize, input: &[Complex64], sign: i64, scale: f64) -> Vec<Complex64> {
    let size = domain.size();
    let m = domain.m;
    let roots: Vec<Complex64> = (0..m as i64).map(|s| root_of_unity(sign * s, m)).collect();
    let coords: Vec<Vec<usize>> = (0..size).map(|x| domain.coords(x)).collect();
    (0..size)
        .into_par_iter()
        .flat_map_iter(|k| {
            let kc = &coords[k];
            let mut acc = vec![Complex64::new(0.0, 0.0); dim];
            for (x, xc) in coords.iter().enumerate() {
                let s = kc.iter().zip(xc).map(|(a, b)| a * b).sum::<usize>() % m;
                let w = roots[s];
                for (a, v) in acc.iter_mut().zip(&input[x * dim..(x + 1) * dim]) {
                    *a += v * w;
                }
            }
            acc.into_iter().map(move |a| a * scale)
        })
        .collect()
}

/// Per-axis mixed-radix transform.
fn fast(domain: TorusDomain, dim: usize, input: &[Complex64], direction: FftDirection, scale: f64) -> Vec<Complex64> {
    let (n, m) = (domain.n, domain.m);
    let size = domain.size();
    let fft = FftPlanner::<f64>::new().plan_fft(m, direction);
    let mut data = input.to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        for base in 0..size {
            if (base / stride) % m != 0 {
                continue;
            }
            for c in 0..dim {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[(base + t * stride) * dim + c];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    data[(base + t * stride) * dim + c] = *v;
                }
            }
        }
    }
    if scale != 1.0 {
        data.iter_mut().for_each(|v| *v *= scale);
    }
    data
}

/// `f̂(k) = (1/m^n) Σ_y f(y)·conj(W_k(y))` by direct summation.
pub fn fourier_forward_direct(f: &VectorField) -> SpectralCoefficients {
    let scale = 1.0 / f.domain.size() as f64;
    SpectralCoefficients { domain: f.domain, dim: f.dim, coeffs: direct(f.domain, f.dim, &f.values, -1, scale) }
}

pub fn fourier_forward_fast(f: &VectorField) -> SpectralCoefficients {
    let scale = 1.0 / f.domain.size() as f64;
    SpectralCoefficients {
        domain: f.domain,
        dim: f.dim,
        coeffs: fast(f.domain, f.dim, &f.values, FftDirection::Forward, scale),
    }
}

pub fn fourier_forward(f: &VectorField) -> SpectralCoefficients {
    if f.domain.size() <= DIRECT_TRANSFORM_LIMIT {
        fourier_forward_direct(f)
    } else {
        fourier_forward_fast(f)
    }
}

/// `f(x) = Σ_k W_k(x) f̂(k)` by direct summation.
pub fn fourier_inverse_direct(c: &SpectralCoefficients) -> VectorField {
    VectorField { domain: c.domain, dim: c.dim, values: direct(c.domain, c.dim, &c.coeffs, 1, 1.0) }
}

pub fn fourier_inverse_fast(c: &SpectralCoefficients) -> VectorField {
    VectorField { domain: c.domain, dim: c.dim, values: fast(c.domain, c.dim, &c.coeffs, FftDirection::Inverse, 1.0) }
}

pub fn fourier_inverse(c: &SpectralCoefficients) -> VectorField {
    if c.domain.size() <= DIRECT_TRANSFORM_LIMIT {
        fourier_inverse_direct(c)
    } else {
        fourier_inverse_fast(c)
    }
}

/// Multiplies every coefficient `f̂(k)` by `symbol(k)` and transforms back.
pub fn apply_symbol(f: &VectorField, symbol: impl Fn(&[usize]) -> Complex64) -> VectorField {
    let mut c = fourier_forward(f);
    for k in 0..f.domain.size() {
        let s = symbol(&f.domain.coords(k));
        c.coeffs[k * f.dim..(k + 1) * f.dim].iter_mut().for_each(|v| *v *= s);
    }
    fourier_inverse(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::derived_rng;

    #[test]
    fn constant_has_single_coefficient() {
        let d = TorusDomain::new(2, 4).unwrap();
        let v = [Complex64::new(2.0, -1.0), Complex64::new(0.0, 3.0)];
        let c = fourier_forward(&VectorField::constant(d, &v));
        assert!((c.at(0)[0] - v[0]).norm() < 1e-15 && (c.at(0)[1] - v[1]).norm() < 1e-15);
        assert!((1..d.size()).all(|k| c.at(k).iter().all(|z| z.norm() < 1e-14)));
    }

    #[test]
    fn character_has_single_coefficient() {
        let d = TorusDomain::new(2, 6).unwrap();
        let k0 = [2, 5];
        let v = [Complex64::new(1.5, 0.5)];
        let c = fourier_forward(&VectorField::character(d, &k0, &v));
        for k in 0..d.size() {
            let expect = if k == d.index(&k0) { v[0] } else { Complex64::new(0.0, 0.0) };
            assert!((c.at(k)[0] - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn fast_path_matches_direct_path() {
        let mut rng = derived_rng(11, 0);
        for (n, m) in [(1, 6), (2, 10), (3, 4), (2, 64), (4, 8)] {
            let d = TorusDomain::new(n, m).unwrap();
            let f = VectorField::gaussian(d, 2, &mut rng);
            let a = fourier_forward_direct(&f);
            let b = fourier_forward_fast(&f);
            let err = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "n={n} m={m} err={err}");
            let back = fourier_inverse_fast(&b);
            assert!(back.max_dist(&fourier_inverse_direct(&a)) < 1e-10);
            assert!(back.max_dist(&f) < 1e-10);
        }
    }

    #[test]
    fn json_dump_shape() {
        let d = TorusDomain::new(1, 2).unwrap();
        let c = fourier_forward(&VectorField::constant(d, &[Complex64::new(1.0, 0.0)]));
        let v: serde_json::Value = serde_json::from_str(&c.to_json_string()).unwrap();
        assert_eq!(v["k"], json!([[0], [1]]));
        assert_eq!(v["re"][0], json!([1.0]));
    }
}
