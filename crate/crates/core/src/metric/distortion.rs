use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FiniteMetricSpace, Metric};
use crate::error::{Error, Result};

/// Lipschitz constants of a map and of its inverse on the image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    pub lip: f64,
    pub colip: f64,
    pub distortion: f64,
}

/// A map between finite metric spaces together with its measured distortion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub source: FiniteMetricSpace,
    pub target: FiniteMetricSpace,
    pub map: Vec<usize>,
    pub lip: f64,
    pub colip: f64,
    pub distortion: f64,
    /// Coordinates of the image points when the target is a grid.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target_coords: Option<Vec<Vec<i64>>>,
}

impl EmbeddingRecord {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

fn check_map<M: Metric + ?Sized, N: Metric + ?Sized>(map: &[usize], source: &M, target: &N) -> Result<()> {
    if map.len() != source.len() {
        return Err(Error::DimensionMismatch { expected: source.len(), got: map.len() });
    }
    for &y in map {
        if y >= target.len() {
            return Err(Error::IndexOutOfRange { index: y, size: target.len() });
        }
    }
    Ok(())
}

/// Distortion of `map` without materializing either space. Pairs are
/// scanned in parallel; the result is a max and so order independent.
pub fn distortion_of<M, N>(map: &[usize], source: &M, target: &N) -> Result<Distortion>
where
    M: Metric + Sync + ?Sized,
    N: Metric + Sync + ?Sized,
{
    check_map(map, source, target)?;
    let n = map.len();
    if n < 2 {
        return Ok(Distortion { lip: 1.0, colip: 1.0, distortion: 1.0 });
    }
    let rows: Vec<std::result::Result<(f64, f64, f64), (usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut lip = 0.0f64;
            let mut colip = 0.0f64;
            let mut low = f64::INFINITY;
            for j in i + 1..n {
                let ds = source.dist(i, j);
                let dt = if map[i] == map[j] { 0.0 } else { target.dist(map[i], map[j]) };
                if dt == 0.0 {
                    return Err((i, j));
                }
                lip = lip.max(dt / ds);
                colip = colip.max(ds / dt);
                low = low.min(dt / ds);
            }
            Ok((lip, colip, low))
        })
        .collect();
    let mut lip = 0.0f64;
    let mut colip = 0.0f64;
    let mut low = f64::INFINITY;
    for r in rows {
        match r {
            Ok((l, c, w)) => {
                lip = lip.max(l);
                colip = colip.max(c);
                low = low.min(w);
            }
            Err((i, j)) => return Err(Error::NotInjective { i, j }),
        }
    }
    // max/min of the same ratio is exactly 1 for similarities, unlike lip·colip.
    Ok(Distortion { lip, colip, distortion: lip / low })
}

/// Exact distortion of an injective map between finite metric spaces.
pub fn distortion(map: &[usize], source: &FiniteMetricSpace, target: &FiniteMetricSpace) -> Result<EmbeddingRecord> {
    let d = distortion_of(map, source, target)?;
    Ok(EmbeddingRecord {
        source: source.clone(),
        target: target.clone(),
        map: map.to_vec(),
        lip: d.lip,
        colip: d.colip,
        distortion: d.distortion,
        target_coords: None,
    })
}

/// Step functions `ω_f` and `Ω_f` tabulated at the distinct source
/// distances `t_1 < ... < t_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuliTables {
    pub breakpoints: Vec<f64>,
    /// `omega[i] = min { d(f(x), f(y)) : d(x, y) >= t_i }`.
    pub omega: Vec<f64>,
    /// `big_omega[i] = max { d(f(x), f(y)) : d(x, y) <= t_i }`.
    pub big_omega: Vec<f64>,
}

impl ModuliTables {
    /// `Ω_f(t)`; zero below the smallest positive source distance.
    pub fn big_omega_at(&self, t: f64) -> f64 {
        match self.breakpoints.partition_point(|&b| b <= t) {
            0 => 0.0,
            i => self.big_omega[i - 1],
        }
    }

    /// `ω_f(t)`; infinite above the diameter, where the defining set is empty.
    pub fn omega_at(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b < t);
        self.omega.get(i).copied().unwrap_or(f64::INFINITY)
    }
}

/// Moduli of an arbitrary map; injectivity is not required.
pub fn moduli_of<M, N>(map: &[usize], source: &M, target: &N) -> Result<ModuliTables>
where
    M: Metric + Sync + ?Sized,
    N: Metric + Sync + ?Sized,
{
    check_map(map, source, target)?;
    let n = map.len();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).map(move |j| {
                let dt = if map[i] == map[j] { 0.0 } else { target.dist(map[i], map[j]) };
                (source.dist(i, j), dt)
            })
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut breakpoints: Vec<f64> = Vec::new();
    let mut group_max: Vec<f64> = Vec::new();
    let mut group_min: Vec<f64> = Vec::new();
    for &(ds, dt) in &pairs {
        match breakpoints.last() {
            Some(&b) if ds == b => {
                let k = breakpoints.len() - 1;
                group_max[k] = group_max[k].max(dt);
                group_min[k] = group_min[k].min(dt);
            }
            _ => {
                breakpoints.push(ds);
                group_max.push(dt);
                group_min.push(dt);
            }
        }
    }
    let mut big_omega = group_max;
    for i in 1..big_omega.len() {
        big_omega[i] = big_omega[i].max(big_omega[i - 1]);
    }
    let mut omega = group_min;
    for i in (0..omega.len().saturating_sub(1)).rev() {
        omega[i] = omega[i].min(omega[i + 1]);
    }
    Ok(ModuliTables { breakpoints, omega, big_omega })
}

pub fn moduli(map: &[usize], source: &FiniteMetricSpace, target: &FiniteMetricSpace) -> Result<ModuliTables> {
    moduli_of(map, source, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{validate_metric, GridSpace, Metric};

    fn grid_identity(n: usize, m: usize, q: f64) -> Distortion {
        let src = GridSpace::new(n, m, f64::INFINITY);
        let dst = GridSpace::new(n, m, q);
        let map: Vec<usize> = (0..src.len()).collect();
        distortion_of(&map, &src, &dst).unwrap()
    }

    #[test]
    fn isometry_has_distortion_one() {
        let s = validate_metric(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]).unwrap();
        let r = distortion(&[2, 1, 0], &s, &s).unwrap();
        assert_eq!(r.distortion, 1.0);
    }

    #[test]
    fn max_grid_into_euclidean() {
        let d = grid_identity(2, 2, 2.0);
        assert!((d.distortion - 2f64.sqrt()).abs() < 1e-15);
        let d = grid_identity(3, 2, 4.0);
        assert!((d.distortion - 3f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn collision_is_reported() {
        let s = FiniteMetricSpace::two_point(1.0);
        assert_eq!(distortion(&[0, 0], &s, &s).unwrap_err(), Error::NotInjective { i: 0, j: 1 });
    }

    #[test]
    fn moduli_examples() {
        let src = GridSpace::new(2, 2, f64::INFINITY);
        let dst = GridSpace::new(2, 2, 2.0);
        let id: Vec<usize> = (0..9).collect();
        let t = moduli_of(&id, &src, &dst).unwrap();
        assert!((t.big_omega_at(1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(t.omega_at(2.0), 2.0);
        assert_eq!(t.big_omega_at(0.5), 0.0);
        assert_eq!(t.omega_at(3.0), f64::INFINITY);

        let constant = vec![0usize; 9];
        let c = moduli_of(&constant, &src, &dst).unwrap();
        assert!(c.big_omega.iter().all(|&v| v == 0.0));
    }
}
