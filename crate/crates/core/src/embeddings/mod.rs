//! Explicit embeddings between cycles, grids and tori, the diagonal-graph
//! geodesics behind grid extraction, and distortion lower bounds.

mod extract;
mod geodesic;
mod obstruction;

pub use extract::{extract_grid, GridExtraction};
pub use geodesic::{diag_geodesic_through, geodesic_family, v_set, GeodesicPath, VSet};
pub use obstruction::{
    character_embedding, coarse_obstruction_check, grid_lower_bound_bound, grid_lower_bound_check,
    l1_snowflake_check, GridLowerBound, SnowflakeCheck,
};

use std::collections::BTreeMap;

use crate::error::{check_budget, Error, Result};
use crate::metric::{distortion_of, grid_distance, EmbeddingRecord, FiniteMetricSpace, GridSpace, Metric, TorusDomain};

/// Most source points an embedding record materializes.
pub const MAX_RECORD_POINTS: usize = 512;

fn cycle_distance(a: i64, b: i64, len: i64) -> i64 {
    if len == 0 {
        return 0;
    }
    let d = (a - b).rem_euclid(len);
    d.min(len - d)
}

fn label(coords: &[i64]) -> String {
    format!("({})", coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
}

/// Builds the record of `x ↦ coords[x]` with the image measured by
/// `target_dist`. The target table holds the distinct image points only.
fn record_from_coords(
    source: FiniteMetricSpace,
    coords: Vec<Vec<i64>>,
    target_dist: impl Fn(&[i64], &[i64]) -> f64,
) -> Result<EmbeddingRecord> {
    let mut distinct: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut points: Vec<Vec<i64>> = Vec::new();
    let map: Vec<usize> = coords
        .iter()
        .map(|c| {
            *distinct.entry(c.clone()).or_insert_with(|| {
                points.push(c.clone());
                points.len() - 1
            })
        })
        .collect();
    if points.len() < coords.len() {
        // Report the first colliding pair.
        for i in 0..coords.len() {
            if let Some(j) = (0..i).find(|&j| coords[j] == coords[i]) {
                return Err(Error::NotInjective { i: j, j: i });
            }
        }
    }
    let table: Vec<Vec<f64>> = points.iter().map(|a| points.iter().map(|b| target_dist(a, b)).collect()).collect();
    let target = FiniteMetricSpace::with_labels(points.iter().map(|p| label(p)).collect(), table)?;
    let d = distortion_of(&map, &source, &target)?;
    Ok(EmbeddingRecord {
        source,
        target,
        map,
        lip: d.lip,
        colip: d.colip,
        distortion: d.distortion,
        target_coords: Some(coords),
    })
}

fn torus_space(domain: &TorusDomain) -> Result<FiniteMetricSpace> {
    check_budget(domain.size() as u128, MAX_RECORD_POINTS as u128)?;
    let labels = (0..domain.size()).map(|x| label(&domain.coords(x).iter().map(|&c| c as i64).collect::<Vec<_>>())).collect();
    let table = (0..domain.size()).map(|a| (0..domain.size()).map(|b| domain.dist(a, b)).collect()).collect();
    FiniteMetricSpace::with_labels(labels, table)
}

fn grid_space(grid: &GridSpace) -> Result<FiniteMetricSpace> {
    check_budget(grid.len() as u128, MAX_RECORD_POINTS as u128)?;
    let labels = (0..grid.len()).map(|x| label(&grid.coords(x))).collect();
    let table = (0..grid.len()).map(|a| (0..grid.len()).map(|b| grid.dist(a, b)).collect()).collect();
    FiniteMetricSpace::with_labels(labels, table)
}

fn linf(a: &[i64], b: &[i64]) -> f64 {
    grid_distance(a, b, f64::INFINITY).expect("equal dimensions")
}

/// Inclusion of the grid `{0, ..., m}^n` (`ℓ_∞`) into `Z_{2m}^n`.
pub fn grid_to_torus(m: usize, n: usize) -> Result<EmbeddingRecord> {
    let grid = GridSpace::new(n, m, f64::INFINITY);
    let source = grid_space(&grid)?;
    let coords: Vec<Vec<i64>> = (0..grid.len()).map(|x| grid.coords(x)).collect();
    let len = 2 * m as i64;
    record_from_coords(source, coords, |a, b| {
        a.iter().zip(b).map(|(&x, &y)| cycle_distance(x, y, len)).max().unwrap_or(0) as f64
    })
}

fn frechet_coords(m: usize, anchors: &[i64]) -> Vec<Vec<i64>> {
    let len = 2 * m as i64;
    (0..len).map(|x| anchors.iter().map(|&a| cycle_distance(x, a, len)).collect()).collect()
}

fn cycle_space(m: usize) -> Result<FiniteMetricSpace> {
    if m == 0 {
        return Err(Error::PreconditionViolation("m must be at least 1".into()));
    }
    torus_space(&TorusDomain::new(1, 2 * m)?)
}

/// `x ↦ (d(x, 0), d(x, 1), ..., d(x, 2m−1))` from `Z_{2m}` into `{0, ..., m}^{2m}`.
pub fn frechet_cycle(m: usize) -> Result<EmbeddingRecord> {
    let source = cycle_space(m)?;
    let anchors: Vec<i64> = (0..2 * m as i64).collect();
    record_from_coords(source, frechet_coords(m, &anchors), linf)
}

/// Anchors `⌊t·ε·m⌋` for `t = 0, ..., ⌈1/ε⌉`.
pub fn sparse_anchors(m: usize, eps: f64) -> Result<Vec<i64>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::PreconditionViolation(format!("eps = {eps} is outside (0, 1]")));
    }
    let count = (1.0 / eps).ceil() as i64;
    Ok((0..=count).map(|t| (t as f64 * eps * m as f64).floor() as i64).collect())
}

/// Image coordinates of the sparse Fréchet map, one row per cycle point.
pub fn sparse_frechet_coords(m: usize, eps: f64) -> Result<Vec<Vec<i64>>> {
    Ok(frechet_coords(m, &sparse_anchors(m, eps)?))
}

/// Fréchet map of `Z_{2m}` restricted to the anchors of [`sparse_anchors`].
/// Fails with `NotInjective` when the anchors do not separate points
/// (always the case for `eps = 1` and `m >= 2`).
pub fn sparse_frechet_cycle(m: usize, eps: f64) -> Result<EmbeddingRecord> {
    let coords = sparse_frechet_coords(m, eps)?;
    record_from_coords(cycle_space(m)?, coords, linf)
}

/// Coordinatewise Fréchet map `Z_{2m}^n -> {0, ..., m}^{2mn}`.
pub fn torus_to_grid_full(m: usize, n: usize) -> Result<EmbeddingRecord> {
    if m == 0 {
        return Err(Error::PreconditionViolation("m must be at least 1".into()));
    }
    let domain = TorusDomain::new(n, 2 * m)?;
    let source = torus_space(&domain)?;
    let anchors: Vec<i64> = (0..2 * m as i64).collect();
    let rows = frechet_coords(m, &anchors);
    let coords = (0..domain.size())
        .map(|x| domain.coords(x).iter().flat_map(|&c| rows[c].iter().copied()).collect())
        .collect();
    record_from_coords(source, coords, linf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_into_torus() {
        let r = grid_to_torus(2, 1).unwrap();
        assert_eq!(r.distortion, 1.0);
        assert_eq!(r.target.dist(0, 2), 2.0);
        assert_eq!(grid_to_torus(4, 2).unwrap().distortion, 1.0);
        assert_eq!(grid_to_torus(0, 3).unwrap().distortion, 1.0);
    }

    #[test]
    fn frechet_examples() {
        let r = frechet_cycle(2).unwrap();
        let coords = r.target_coords.as_ref().unwrap();
        assert_eq!(coords[0], vec![0, 1, 2, 1]);
        assert_eq!(coords[2], vec![2, 1, 0, 1]);
        assert_eq!(r.distortion, 1.0);
        let r = frechet_cycle(5).unwrap();
        assert_eq!(r.target.dist(r.map[0], r.map[5]), 5.0);
    }

    #[test]
    fn sparse_examples() {
        let coords = sparse_frechet_coords(8, 1.0).unwrap();
        assert_eq!(coords[0].len(), 2);
        assert!(matches!(sparse_frechet_cycle(8, 1.0), Err(Error::NotInjective { .. })));
        let r = sparse_frechet_cycle(32, 0.25).unwrap();
        assert!(r.distortion <= 2.5);
        assert_eq!(r.target_coords.unwrap()[0].len(), 5);
    }

    #[test]
    fn full_torus_product() {
        assert_eq!(torus_to_grid_full(2, 2).unwrap().distortion, 1.0);
        let one = torus_to_grid_full(3, 1).unwrap();
        assert_eq!(one.target_coords, frechet_cycle(3).unwrap().target_coords);
        assert!(matches!(torus_to_grid_full(5, 3), Err(Error::BudgetExceeded { .. })));
    }
}
