//! Dense tables realizing maps `f: Z_m^n -> codomain`, and the distance
//! callback shared by every functional that only needs `d(f(x), f(y))`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Metric, TorusDomain};
use crate::numeric::Norm;

/// `f: Z_m^n -> C^d`, stored point-major: `values[x * dim + c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub domain: TorusDomain,
    pub dim: usize,
    pub values: Vec<Complex64>,
}

impl VectorField {
    pub fn new(domain: TorusDomain, dim: usize, values: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || values.len() != domain.size() * dim {
            return Err(Error::DimensionMismatch { expected: domain.size() * dim.max(1), got: values.len() });
        }
        Ok(Self { domain, dim, values })
    }

    pub fn zeros(domain: TorusDomain, dim: usize) -> Self {
        Self { domain, dim, values: vec![Complex64::new(0.0, 0.0); domain.size() * dim] }
    }

    pub fn from_fn(domain: TorusDomain, dim: usize, mut f: impl FnMut(&[usize]) -> Vec<Complex64>) -> Self {
        let mut values = Vec::with_capacity(domain.size() * dim);
        for x in 0..domain.size() {
            let v = f(&domain.coords(x));
            assert_eq!(v.len(), dim, "value has wrong dimension");
            values.extend(v);
        }
        Self { domain, dim, values }
    }

    pub fn constant(domain: TorusDomain, v: &[Complex64]) -> Self {
        Self::from_fn(domain, v.len(), |_| v.to_vec())
    }

    /// `x ↦ W_k(x)·v`.
    pub fn character(domain: TorusDomain, k: &[usize], v: &[Complex64]) -> Self {
        Self::from_fn(domain, v.len(), |x| {
            let w = crate::harmonic::walsh_char(k, x, &domain);
            v.iter().map(|c| c * w).collect()
        })
    }

    /// Independent standard complex Gaussian entries.
    pub fn gaussian<R: Rng>(domain: TorusDomain, dim: usize, rng: &mut R) -> Self {
        let values = (0..domain.size() * dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self { domain, dim, values }
    }

    /// Real standard Gaussian entries.
    pub fn gaussian_real<R: Rng>(domain: TorusDomain, dim: usize, rng: &mut R) -> Self {
        let values = (0..domain.size() * dim).map(|_| Complex64::new(rng.sample(StandardNormal), 0.0)).collect();
        Self { domain, dim, values }
    }

    pub fn at(&self, x: usize) -> &[Complex64] {
        &self.values[x * self.dim..(x + 1) * self.dim]
    }

    pub fn at_mut(&mut self, x: usize) -> &mut [Complex64] {
        &mut self.values[x * self.dim..(x + 1) * self.dim]
    }

    /// `max_x ‖f(x)‖_2`, the scale used for relative tolerances.
    pub fn scale(&self) -> f64 {
        (0..self.domain.size())
            .map(|x| self.at(x).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// `x ↦ f(x + delta)`.
    pub fn translate(&self, delta: &[i64]) -> Self {
        let table = self.domain.shift_table(delta);
        let mut values = Vec::with_capacity(self.values.len());
        for &y in &table {
            values.extend_from_slice(self.at(y));
        }
        Self { domain: self.domain, dim: self.dim, values }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self { domain: self.domain, dim: self.dim, values }
    }

    pub fn add(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self { domain: self.domain, dim: self.dim, values }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { domain: self.domain, dim: self.dim, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Largest pointwise `ℓ_2` distance to another field.
    pub fn max_dist(&self, other: &Self) -> f64 {
        (0..self.domain.size())
            .map(|x| {
                self.at(x)
                    .iter()
                    .zip(other.at(x))
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// `f: Z_m^n -> M` as point indices into a finite metric space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointMap {
    pub domain: TorusDomain,
    pub values: Vec<usize>,
}

impl PointMap {
    pub fn new(domain: TorusDomain, values: Vec<usize>, codomain_size: usize) -> Result<Self> {
        if values.len() != domain.size() {
            return Err(Error::DimensionMismatch { expected: domain.size(), got: values.len() });
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= codomain_size) {
            return Err(Error::IndexOutOfRange { index: bad, size: codomain_size });
        }
        Ok(Self { domain, values })
    }

    pub fn constant(domain: TorusDomain, point: usize) -> Self {
        Self { domain, values: vec![point; domain.size()] }
    }

    /// The identity of `Z_m^n`, valued in the torus itself.
    pub fn identity(domain: TorusDomain) -> Self {
        Self { domain, values: (0..domain.size()).collect() }
    }

    pub fn random<R: Rng>(domain: TorusDomain, codomain_size: usize, rng: &mut R) -> Self {
        Self { domain, values: (0..domain.size()).map(|_| rng.random_range(0..codomain_size)).collect() }
    }
}

/// A grid function with either codomain kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "codomain_kind", rename_all = "kebab-case")]
pub enum GridFunction {
    MetricPoint(PointMap),
    ComplexVector(VectorField),
}

impl GridFunction {
    pub fn domain(&self) -> TorusDomain {
        match self {
            GridFunction::MetricPoint(f) => f.domain,
            GridFunction::ComplexVector(f) => f.domain,
        }
    }
}

/// `(x, y) ↦ d(f(x), f(y))` for a fixed map `f` on a torus.
pub trait FieldDistance: Sync {
    fn domain(&self) -> TorusDomain;
    fn dist(&self, x: usize, y: usize) -> f64;
    fn witness(&self) -> GridFunction;
}

/// A point map composed with the metric of its codomain.
pub struct MetricField<'a, M: Metric + Sync + ?Sized> {
    pub f: &'a PointMap,
    pub space: &'a M,
}

impl<'a, M: Metric + Sync + ?Sized> MetricField<'a, M> {
    pub fn new(f: &'a PointMap, space: &'a M) -> Result<Self> {
        if let Some(&bad) = f.values.iter().find(|&&v| v >= space.len()) {
            return Err(Error::IndexOutOfRange { index: bad, size: space.len() });
        }
        Ok(Self { f, space })
    }
}

impl<M: Metric + Sync + ?Sized> FieldDistance for MetricField<'_, M> {
    fn domain(&self) -> TorusDomain {
        self.f.domain
    }

    fn dist(&self, x: usize, y: usize) -> f64 {
        let (a, b) = (self.f.values[x], self.f.values[y]);
        if a == b {
            0.0
        } else {
            self.space.dist(a, b)
        }
    }

    fn witness(&self) -> GridFunction {
        GridFunction::MetricPoint(self.f.clone())
    }
}

/// A vector field measured in a finite-dimensional norm.
pub struct NormedField<'a> {
    pub f: &'a VectorField,
    pub norm: Norm,
}

impl<'a> NormedField<'a> {
    pub fn new(f: &'a VectorField, norm: Norm) -> Result<Self> {
        if f.dim != norm.dim {
            return Err(Error::DimensionMismatch { expected: norm.dim, got: f.dim });
        }
        Ok(Self { f, norm })
    }
}

impl FieldDistance for NormedField<'_> {
    fn domain(&self) -> TorusDomain {
        self.f.domain
    }

    fn dist(&self, x: usize, y: usize) -> f64 {
        self.norm.dist(self.f.at(x), self.f.at(y))
    }

    fn witness(&self) -> GridFunction {
        GridFunction::ComplexVector(self.f.clone())
    }
}
