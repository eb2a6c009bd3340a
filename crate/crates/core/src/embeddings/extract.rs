use serde::{Deserialize, Serialize};

use super::geodesic::geodesic_family;
use super::{grid_space, label};
use crate::cotype::{axis_sum, sign_edge_mean};
use crate::error::{Error, Result};
use crate::field::FieldDistance;
use crate::metric::{distortion_of, EmbeddingRecord, FiniteMetricSpace, GridSpace, Metric};

/// Selection made by [`extract_grid`] and the resulting grid embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridExtraction {
    pub s: usize,
    /// `1 − lhs / (s² n rhs)`: the smallest deficiency the witness meets.
    pub eta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub x0: Vec<usize>,
    pub y0: Vec<usize>,
    /// Reflection applied after translating `y0` to the origin.
    pub sigma: Vec<i64>,
    /// Distances were divided by this before choosing `y0`.
    pub normalization: f64,
    /// `[s/4]_∞^n -> image`, `u ↦ f(y0 + σ ⊙ 2u)`.
    pub record: EmbeddingRecord,
}

struct Pulled<'a, F: FieldDistance + ?Sized> {
    field: &'a F,
    points: Vec<usize>,
}

impl<F: FieldDistance + ?Sized> Metric for Pulled<'_, F> {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.field.dist(self.points[i], self.points[j])
        }
    }
}

/// Locates a copy of the grid `[s/4]_∞^n` inside the image of a witness
/// that nearly attains equality in the `B(M; n, s)` inequality.
///
/// The selection follows the averaging argument: the defect of every
/// diagonal geodesic `x -> x ± s e_j` against the straight-line value is
/// weighed against the edge energy at `x` (the function `ψ`), `x0`
/// maximizes the sum of `ψ` over the `ℓ_∞` ball of radius `s − 1`, the
/// metric is rescaled so that the ball averages unit edge energy, and `y0`
/// is the first ball point with edge energy at least 1. Ties go to the
/// smallest linearized index. Requires `4 | s` and `m >= 2s`.
pub fn extract_grid<F: FieldDistance + ?Sized>(field: &F, s: usize) -> Result<GridExtraction> {
    let d = field.domain();
    let (n, m) = (d.n, d.m);
    if s == 0 || !s.is_multiple_of(4) {
        return Err(Error::PreconditionViolation(format!("s = {s} must be a positive multiple of 4")));
    }
    if m < 2 * s {
        return Err(Error::PreconditionViolation(format!("m = {m} must be at least 2s = {}", 2 * s)));
    }
    let lhs = axis_sum(field, s as i64, 2.0);
    let rhs = sign_edge_mean(field, 2.0);
    if !(rhs > 0.0 && lhs > 0.0) {
        return Err(Error::HypothesisFailed(format!("no η < 1 works: lhs = {lhs}, rhs = {rhs}")));
    }
    let eta = (1.0 - lhs / ((s * s * n) as f64 * rhs)).max(0.0);

    let signs = d.sign_vectors();
    let sign_tables: Vec<Vec<usize>> = signs.iter().map(|e| d.shift_table(e)).collect();
    let energy: Vec<f64> = (0..d.size())
        .map(|x| sign_tables.iter().map(|t| field.dist(t[x], x).powi(2)).sum::<f64>() / signs.len() as f64)
        .collect();

    let zero = vec![0i64; n];
    let families: Vec<Vec<super::GeodesicPath>> =
        (0..n).map(|j| geodesic_family(&zero, j, s, &d)).collect::<Result<_>>()?;
    let weight = 2.0 * eta * (s * n) as f64 * 2f64.powi((s * n) as i32);
    let psi: Vec<f64> = (0..d.size())
        .map(|x| {
            let mut defect = 0.0;
            for fam in &families {
                for path in fam {
                    let pts: Vec<usize> = path.points.iter().map(|p| d.shift(x, p)).collect();
                    let chord = field.dist(pts[s], x) / s as f64;
                    for w in pts.windows(2) {
                        let gap = field.dist(w[1], w[0]) - chord;
                        defect += gap * gap;
                    }
                }
            }
            weight * energy[x] - defect
        })
        .collect();

    let radius = s as i64 - 1;
    let ball: Vec<Vec<i64>> = {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (-radius..=radius).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        out
    };
    let ball_sum = |x: usize, values: &[f64]| ball.iter().map(|o| values[d.shift(x, o)]).sum::<f64>();
    let x0 = (0..d.size()).fold(0, |best, x| if ball_sum(x, &psi) > ball_sum(best, &psi) { x } else { best });
    let normalization = (ball_sum(x0, &energy) / ball.len() as f64).sqrt();
    let mut members: Vec<usize> = ball.iter().map(|o| d.shift(x0, o)).collect();
    members.sort_unstable();
    let y0 = *members
        .iter()
        .find(|&&y| energy[y] / (normalization * normalization) >= 1.0 - 1e-12)
        .expect("some ball point reaches the ball average");

    let (xc, yc) = (d.coords(x0), d.coords(y0));
    let sigma: Vec<i64> = xc
        .iter()
        .zip(&yc)
        .map(|(&a, &b)| {
            let diff = (a as i64 - b as i64).rem_euclid(m as i64);
            if diff > (m / 2) as i64 {
                -1
            } else {
                1
            }
        })
        .collect();

    let grid = GridSpace::new(n, s / 4, f64::INFINITY);
    let points: Vec<usize> = (0..grid.len())
        .map(|u| {
            let delta: Vec<i64> = grid.coords(u).iter().zip(&sigma).map(|(c, g)| 2 * c * g).collect();
            d.shift(y0, &delta)
        })
        .collect();
    let pulled = Pulled { field, points };
    let map: Vec<usize> = (0..grid.len()).collect();
    let dist = distortion_of(&map, &grid, &pulled)?;
    let labels = pulled
        .points
        .iter()
        .map(|&x| label(&d.coords(x).iter().map(|&c| c as i64).collect::<Vec<_>>()))
        .collect();
    let table = (0..pulled.len()).map(|a| (0..pulled.len()).map(|b| pulled.dist(a, b)).collect()).collect();
    let target = FiniteMetricSpace::with_labels(labels, table)?;
    let coords = pulled.points.iter().map(|&x| d.coords(x).iter().map(|&c| c as i64).collect()).collect();
    Ok(GridExtraction {
        s,
        eta,
        lhs,
        rhs,
        x0: xc,
        y0: yc,
        sigma,
        normalization,
        record: EmbeddingRecord {
            source: grid_space(&grid)?,
            target,
            map,
            lip: dist.lip,
            colip: dist.colip,
            distortion: dist.distortion,
            target_coords: Some(coords),
        },
    })
}
