use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::TorusDomain;

/// Points of `Z_m^n` whose coordinates are all even and lie in `[0, s/2]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VSet {
    pub s: usize,
    pub n: usize,
    pub members: Vec<Vec<i64>>,
}

impl VSet {
    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.n && x.iter().all(|&c| c >= 0 && c % 2 == 0 && 2 * c <= self.s as i64)
    }
}

pub fn v_set(s: usize, n: usize) -> Result<VSet> {
    if s == 0 || !s.is_multiple_of(2) {
        return Err(Error::PreconditionViolation(format!("s = {s} must be positive and even")));
    }
    let values: Vec<i64> = (0..=(s / 2) as i64).step_by(2).collect();
    let mut members = vec![Vec::new()];
    for _ in 0..n {
        members = members
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(VSet { s, n, members })
}

/// A walk of `s` diagonal steps from `start` to `start + sign·s·e_j`.
/// `points` are unreduced integer coordinates; reduce mod `m` for torus
/// positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub j: usize,
    pub sign: i64,
    pub points: Vec<Vec<i64>>,
    /// Step at which the path passes the second requested point.
    pub through_step: usize,
}

impl GeodesicPath {
    pub fn start(&self) -> &[i64] {
        &self.points[0]
    }

    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> Vec<Vec<i64>> {
        self.points.windows(2).map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect()).collect()
    }

    /// Checks that every step is diagonal on `Z_m^n` and that the walk has
    /// `s` steps and ends at `start + sign·s·e_j`.
    pub fn validate(&self, s: usize, domain: &TorusDomain) -> Result<()> {
        let m = domain.m as i64;
        if self.len() != s {
            return Err(Error::PreconditionViolation(format!("path has {} steps, expected {s}", self.len())));
        }
        for (i, step) in self.steps().iter().enumerate() {
            if step.iter().any(|&d| d.rem_euclid(m) != 1 && d.rem_euclid(m) != m - 1) {
                return Err(Error::PreconditionViolation(format!("step {i} is {step:?}, not diagonal")));
            }
        }
        let mut end = self.points[0].clone();
        end[self.j] += self.sign * s as i64;
        let last = &self.points[s];
        if end.iter().zip(last).any(|(a, b)| (a - b).rem_euclid(m) != 0) {
            return Err(Error::PreconditionViolation(format!("path ends at {last:?}, expected {end:?}")));
        }
        Ok(())
    }
}

fn check_shape(s: usize, domain: &TorusDomain) -> Result<()> {
    if s == 0 || !s.is_multiple_of(4) {
        return Err(Error::PreconditionViolation(format!("s = {s} must be a positive multiple of 4")));
    }
    if domain.m < 2 * s {
        return Err(Error::PreconditionViolation(format!("m = {} must be at least 2s = {}", domain.m, 2 * s)));
    }
    Ok(())
}

/// A length-`s` geodesic from `z ∈ {x, y}` to `z + s·e_j` passing through
/// the other point. The first half walks to the other point in pairs of
/// diagonal steps (moving toward it in each coordinate, or stepping +1 then
/// −1 once a coordinate has arrived), the second half mirrors those pairs
/// about the `e_j` axis, and the rest alternates `e_j ± Σ_{ℓ≠j} e_ℓ`.
pub fn diag_geodesic_through(x: &[i64], y: &[i64], s: usize, domain: &TorusDomain) -> Result<GeodesicPath> {
    check_shape(s, domain)?;
    let v = v_set(s, domain.n)?;
    for p in [x, y] {
        if !v.contains(p) {
            return Err(Error::PreconditionViolation(format!("{p:?} is not in V")));
        }
    }
    let n = domain.n;
    let (j, t) = (0..n)
        .map(|r| (r, (y[r] - x[r]).abs()))
        .fold((0, -1), |best, c| if c.1 > best.1 { c } else { best });
    let (from, to) = if y[j] >= x[j] { (x, y) } else { (y, x) };
    let mut points = vec![from.to_vec()];
    let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    for _ in 0..t / 2 {
        let cur = points.last().unwrap().clone();
        let eps: Vec<i64> = (0..n).map(|r| if cur[r] > to[r] { -1 } else { 1 }).collect();
        let delta: Vec<i64> = (0..n).map(|r| if cur[r] < to[r] { 1 } else { -1 }).collect();
        let a: Vec<i64> = cur.iter().zip(&eps).map(|(c, e)| c + e).collect();
        let b: Vec<i64> = a.iter().zip(&delta).map(|(c, d)| c + d).collect();
        points.push(a);
        points.push(b);
        pairs.push((eps, delta));
    }
    debug_assert_eq!(points.last().unwrap(), &to.to_vec());
    let through_step = points.len() - 1;
    for (eps, delta) in &pairs {
        for step in [eps, delta] {
            let cur = points.last().unwrap();
            let next: Vec<i64> = (0..n).map(|r| cur[r] - step[r] + if r == j { 2 } else { 0 }).collect();
            points.push(next);
        }
    }
    let mut flip = 1;
    while points.len() < s + 1 {
        let cur = points.last().unwrap();
        let next: Vec<i64> = (0..n).map(|r| cur[r] + if r == j { 1 } else { flip }).collect();
        points.push(next);
        flip = -flip;
    }
    Ok(GeodesicPath { j, sign: 1, points, through_step })
}

/// Every length-`s` diagonal geodesic from `x` to `x ± s·e_j` (both signs):
/// `ε_j` is constant and each other coordinate is a ±1 bridge of length `s`
/// with zero sum. Requires `m >= 2s`.
pub fn geodesic_family(x: &[i64], j: usize, s: usize, domain: &TorusDomain) -> Result<Vec<GeodesicPath>> {
    if domain.m < 2 * s || !s.is_multiple_of(2) {
        return Err(Error::PreconditionViolation("geodesic families need even s and m >= 2s".into()));
    }
    let bridges: Vec<Vec<i64>> = (0u64..1 << s)
        .filter(|mask| mask.count_ones() as usize == s / 2)
        .map(|mask| (0..s).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect())
        .collect();
    let others = domain.n - 1;
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        // One bridge index per coordinate other than j.
        let total = bridges.len().pow(others as u32);
        for combo in 0..total {
            let mut choice = Vec::with_capacity(others);
            let mut c = combo;
            for _ in 0..others {
                choice.push(c % bridges.len());
                c /= bridges.len();
            }
            choice.reverse();
            let mut points = vec![x.to_vec()];
            for step in 0..s {
                let cur = points.last().unwrap();
                let mut it = choice.iter();
                let next: Vec<i64> = (0..domain.n)
                    .map(|r| cur[r] + if r == j { sign } else { bridges[*it.next().unwrap()][step] })
                    .collect();
                points.push(next);
            }
            out.push(GeodesicPath { j, sign, points, through_step: 0 });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::diag_distance;

    #[test]
    fn v_set_size() {
        assert_eq!(v_set(4, 2).unwrap().members.len(), 4);
        assert_eq!(v_set(8, 3).unwrap().members.len(), 27);
        assert!(v_set(8, 2).unwrap().contains(&[4, 2]));
        assert!(!v_set(8, 2).unwrap().contains(&[6, 2]));
    }

    #[test]
    fn example_path() {
        let d = TorusDomain::new(2, 8).unwrap();
        let p = diag_geodesic_through(&[0, 0], &[2, 2], 4, &d).unwrap();
        p.validate(4, &d).unwrap();
        assert_eq!(p.points[0], vec![0, 0]);
        assert_eq!(p.points[2], vec![2, 2]);
        assert_eq!(p.through_step, 2);
        let same = diag_geodesic_through(&[2, 0], &[2, 0], 4, &d).unwrap();
        same.validate(4, &d).unwrap();
        assert_eq!(same.through_step, 0);
    }

    #[test]
    fn rejects_bad_shapes() {
        let d = TorusDomain::new(2, 6).unwrap();
        assert!(diag_geodesic_through(&[0, 0], &[2, 2], 4, &d).is_err());
        let d = TorusDomain::new(2, 8).unwrap();
        assert!(diag_geodesic_through(&[0, 0], &[1, 2], 4, &d).is_err());
        assert!(diag_geodesic_through(&[0, 0], &[2, 2], 6, &d).is_err());
    }

    #[test]
    fn family_size_and_validity() {
        let d = TorusDomain::new(2, 8).unwrap();
        let fam = geodesic_family(&[1, 3], 0, 4, &d).unwrap();
        assert_eq!(fam.len(), 12);
        for p in &fam {
            p.validate(4, &d).unwrap();
        }
        let d3 = TorusDomain::new(3, 8).unwrap();
        assert_eq!(geodesic_family(&[0, 0, 0], 1, 4, &d3).unwrap().len(), 72);
    }

    #[test]
    fn all_pairs_at_s8_are_certified() {
        let d = TorusDomain::new(2, 16).unwrap();
        let v = v_set(8, 2).unwrap();
        for x in &v.members {
            for y in &v.members {
                let p = diag_geodesic_through(x, y, 8, &d).unwrap();
                p.validate(8, &d).unwrap();
                let other = if p.start() == x.as_slice() { y } else { x };
                assert_eq!(&p.points[p.through_step], other);
                let linf = x.iter().zip(y).map(|(a, b)| (a - b).abs()).max().unwrap() as u64;
                assert_eq!(diag_distance(x, y, &d).unwrap(), linf);
                assert_eq!(p.through_step as u64, linf);
            }
        }
    }
}
