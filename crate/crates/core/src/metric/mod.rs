//! Finite metric spaces, the torus and grid metrics, the diagonal Cayley
//! graph, snowflaking, distortion and the continuity moduli of a map.

mod distortion;
mod torus;

pub use distortion::{distortion, distortion_of, moduli, moduli_of, Distortion, EmbeddingRecord, ModuliTables};
pub use torus::{diag_distance, grid_distance, sign_vectors, torus_distance, GridSpace, TorusDomain, DEFAULT_POINT_BUDGET, DIAG_BFS_BUDGET};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::numeric::Norm;
use num_complex::Complex64;

/// Anything with finitely many points and a distance between them.
pub trait Metric {
    fn len(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Copies the distances into a validated table.
    fn materialize(&self) -> Result<FiniteMetricSpace> {
        let n = self.len();
        let dist = (0..n).map(|i| (0..n).map(|j| self.dist(i, j)).collect()).collect();
        FiniteMetricSpace::with_labels((0..n).map(|i| i.to_string()).collect(), dist)
    }
}

/// `N` labelled points with a distance table satisfying the metric axioms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

/// Relative slack used for the triangle inequality, scaled by the largest
/// distance in the table.
pub const TRIANGLE_SLACK: f64 = 1e-12;

/// Checks the four metric axioms, reporting the first violation found
/// (entry checks in row-major order, then triangles).
pub fn validate_metric(dist: Vec<Vec<f64>>) -> Result<FiniteMetricSpace> {
    let n = dist.len();
    FiniteMetricSpace::with_labels((0..n).map(|i| i.to_string()).collect(), dist)
}

impl FiniteMetricSpace {
    pub fn with_labels(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if labels.len() != n {
            return Err(Error::LabelMismatch { labels: labels.len(), size: n });
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { row: i, len: row.len(), expected: n });
            }
        }
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = dist[i][j];
                if !d.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                if d < 0.0 {
                    return Err(Error::NegativeDistance { i, j });
                }
                if i == j && d != 0.0 {
                    return Err(Error::NonzeroDiagonal { i });
                }
                if i != j && d == 0.0 {
                    return Err(Error::ZeroOffDiagonal { i, j });
                }
                if d != dist[j][i] {
                    return Err(Error::Asymmetry { i: i.min(j), j: i.max(j) });
                }
                max = max.max(d);
            }
        }
        let slack = TRIANGLE_SLACK * max;
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if k != i && k != j && dist[i][j] > dist[i][k] + dist[k][j] + slack {
                        return Err(Error::TriangleViolation { i, j, via: k });
                    }
                }
            }
        }
        Ok(Self { labels, dist })
    }

    /// The two-point space `{u, v}` with `d(u, v) = d`.
    pub fn two_point(d: f64) -> Self {
        Self {
            labels: vec!["u".into(), "v".into()],
            dist: vec![vec![0.0, d], vec![d, 0.0]],
        }
    }

    /// Finite subset of `ℓ_p^d` with the induced metric. Points must be
    /// pairwise distinct.
    pub fn from_points(points: &[Vec<Complex64>], norm: Norm) -> Result<Self> {
        let n = points.len();
        for p in points {
            if p.len() != norm.dim {
                return Err(Error::DimensionMismatch { expected: norm.dim, got: p.len() });
            }
        }
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = norm.dist(&points[i], &points[j]);
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        FiniteMetricSpace::with_labels((0..n).map(|i| i.to_string()).collect(), dist)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Parses the `{"labels": [...], "dist": [[...]]}` file format. Errors
    /// name the offending position as a JSON path.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| Error::InvalidMetricFile {
            path: "$".into(),
            reason: e.to_string(),
        })?;
        let invalid = |path: String, reason: &str| Error::InvalidMetricFile { path, reason: reason.into() };
        let obj = root.as_object().ok_or_else(|| invalid("$".into(), "expected an object"))?;
        let rows = obj
            .get("dist")
            .ok_or_else(|| invalid("$.dist".into(), "missing field"))?
            .as_array()
            .ok_or_else(|| invalid("$.dist".into(), "expected an array of rows"))?;
        let mut dist = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| invalid(format!("$.dist[{i}]"), "expected an array"))?;
            let mut out = Vec::with_capacity(row.len());
            for (j, v) in row.iter().enumerate() {
                out.push(
                    v.as_f64()
                        .ok_or_else(|| invalid(format!("$.dist[{i}][{j}]"), "expected a number"))?,
                );
            }
            dist.push(out);
        }
        let labels = match obj.get("labels") {
            None => (0..dist.len()).map(|i| i.to_string()).collect(),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(invalid(format!("$.labels[{i}]"), "expected a string")),
                })
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(invalid("$.labels".into(), "expected an array")),
        };
        Self::with_labels(labels, dist).map_err(|e| {
            let path = match &e {
                Error::NotSquare { row, .. } => format!("$.dist[{row}]"),
                Error::NonFinite { i, j }
                | Error::NegativeDistance { i, j }
                | Error::ZeroOffDiagonal { i, j }
                | Error::Asymmetry { i, j }
                | Error::TriangleViolation { i, j, .. } => format!("$.dist[{i}][{j}]"),
                Error::NonzeroDiagonal { i } => format!("$.dist[{i}][{i}]"),
                Error::LabelMismatch { .. } => "$.labels".into(),
                _ => "$.dist".into(),
            };
            Error::InvalidMetricFile { path, reason: e.to_string() }
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("metric space serializes")
    }
}

impl Metric for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.dist.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    fn materialize(&self) -> Result<FiniteMetricSpace> {
        Ok(self.clone())
    }
}

/// Raises every distance to the power `alpha`.
pub fn snowflake(space: &FiniteMetricSpace, alpha: f64) -> Result<FiniteMetricSpace> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let dist = space
        .dist
        .iter()
        .map(|row| row.iter().map(|d| if alpha == 1.0 { *d } else { d.powf(alpha) }).collect())
        .collect();
    FiniteMetricSpace::with_labels(space.labels.clone(), dist)
}

/// Points of `ℓ_p^d` under the induced norm distance, without materializing
/// the full table.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub points: Vec<Vec<Complex64>>,
    pub norm: Norm,
}

impl Metric for PointCloud {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.norm.dist(&self.points[i], &self.points[j])
    }
}

/// Distances of an inner metric raised to a power; `sqrt` of an `ℓ_1`
/// distance is the usual example.
pub struct Snowflaked<'a, M: Metric> {
    pub inner: &'a M,
    pub alpha: f64,
}

impl<M: Metric> Metric for Snowflaked<'_, M> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.inner.dist(i, j).powf(self.alpha)
    }
}
