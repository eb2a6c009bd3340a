use metric_cotype::field::PointMap;
use metric_cotype::metric::{
    diag_distance, distortion, moduli, snowflake, torus_distance, validate_metric, FiniteMetricSpace, Metric,
    TorusDomain,
};
use metric_cotype::numeric::{derived_rng, Norm};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn random_space(size: usize, dim: usize, p: f64, seed: u64) -> FiniteMetricSpace {
    let mut rng = derived_rng(seed, 0);
    let points: Vec<Vec<Complex64>> = (0..size)
        .map(|_| (0..dim).map(|_| Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0))).collect())
        .collect();
    FiniteMetricSpace::from_points(&points, Norm::new(p, dim).unwrap()).unwrap()
}

fn signed(c: Vec<usize>) -> Vec<i64> {
    c.into_iter().map(|v| v as i64).collect()
}

#[test]
fn torus_axioms_on_all_triples() {
    for (n, m) in [(1, 2), (1, 7), (1, 16), (2, 2), (2, 5), (2, 8), (2, 16), (3, 3), (3, 6), (4, 2), (4, 4)] {
        let d = TorusDomain::new(n, m).unwrap();
        // materialize() runs the full axiom check, triangle inequality over every triple.
        d.materialize().unwrap_or_else(|e| panic!("n={n} m={m}: {e}"));
    }
}

/// Every triple `(x, y, z)` is a translate of `(0, a, a + b)`, so
/// translation invariance plus the triangle inequality on those triples
/// covers all triples.
#[test]
fn torus_axioms_by_translation() {
    for (n, m) in [(1, 64), (2, 36), (3, 10), (4, 6)] {
        let d = TorusDomain::new(n, m).unwrap();
        let size = d.size();
        let zero = vec![0i64; n];
        let from_zero: Vec<u64> = (0..size).map(|a| torus_distance(&zero, &signed(d.coords(a)), &d).unwrap()).collect();
        for x in 0..size {
            let xc = signed(d.coords(x));
            for y in 0..size {
                let diff: Vec<i64> = signed(d.coords(y)).iter().zip(&xc).map(|(b, a)| b - a).collect();
                assert_eq!(d.distance_idx(x, y) as u64, from_zero[d.index_of(&diff)]);
            }
        }
        for a in 0..size {
            assert_eq!(from_zero[a] == 0, a == 0);
            let ac = signed(d.coords(a));
            let neg: Vec<i64> = ac.iter().map(|c| -c).collect();
            assert_eq!(from_zero[a], from_zero[d.index_of(&neg)]);
            for b in 0..size {
                let sum: Vec<i64> = ac.iter().zip(d.coords(b)).map(|(x, y)| x + y as i64).collect();
                assert!(from_zero[d.index_of(&sum)] <= from_zero[a] + from_zero[b]);
            }
        }
    }
}

#[test]
fn torus_diameter_is_half_m() {
    for (n, m) in [(1, 5), (2, 6), (3, 7), (2, 8)] {
        let d = TorusDomain::new(n, m).unwrap();
        let max = (0..d.size()).map(|y| d.distance_idx(0, y)).max().unwrap();
        assert_eq!(max, m / 2);
        let antipode = vec![(m / 2) as i64; n];
        assert_eq!(torus_distance(&vec![0; n], &antipode, &d).unwrap(), (m / 2) as u64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diag_distance_along_axis(n in 1usize..=3, half in 2usize..=6, j in 0usize..3, r_half in 0usize..=3, seed: u64) {
        let m = 2 * half;
        let j = j % n;
        let r = (2 * r_half).min(m / 2) & !1;
        let d = TorusDomain::new(n, m).unwrap();
        let mut rng = derived_rng(seed, 1);
        let x: Vec<i64> = (0..n).map(|_| rng.random_range(0..m as i64)).collect();
        let mut y = x.clone();
        y[j] = (y[j] + r as i64) % m as i64;
        prop_assert_eq!(diag_distance(&x, &y, &d).unwrap(), r as u64);
    }

    #[test]
    fn snowflake_keeps_axioms(size in 2usize..12, dim in 1usize..4, p in 1.0f64..6.0, alpha in 0.01f64..=1.0, seed: u64) {
        let space = random_space(size, dim, p, seed);
        let flake = snowflake(&space, alpha).unwrap();
        prop_assert!(validate_metric(flake.table().to_vec()).is_ok());
    }

    #[test]
    fn distortion_at_least_one(size in 2usize..10, seed: u64) {
        let source = random_space(size, 2, 2.0, seed);
        let target = random_space(size, 3, 1.0, seed ^ 0xabc);
        let map: Vec<usize> = (0..size).collect();
        let r = distortion(&map, &source, &target).unwrap();
        prop_assert!(r.distortion >= 1.0);
        let ratios: Vec<f64> = (0..size)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| target.dist(i, j) / source.dist(i, j))
            .collect();
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((r.distortion - hi / lo).abs() <= 1e-12 * r.distortion);
    }

    #[test]
    fn similarities_have_distortion_one(size in 2usize..10, scale in 0.1f64..10.0, seed: u64) {
        let source = random_space(size, 2, 3.0, seed);
        let scaled: Vec<Vec<f64>> = source.table().iter().map(|row| row.iter().map(|v| v * scale).collect()).collect();
        let target = validate_metric(scaled).unwrap();
        let mut rng = derived_rng(seed, 2);
        let mut perm: Vec<usize> = (0..size).collect();
        for i in (1..size).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        // Relabel the target so that the identity on labels is an isometry up to scale.
        let relabeled: Vec<Vec<f64>> =
            (0..size).map(|a| (0..size).map(|b| target.dist(perm[a], perm[b])).collect()).collect();
        let target = validate_metric(relabeled).unwrap();
        let inverse: Vec<usize> = (0..size).map(|x| perm.iter().position(|&p| p == x).unwrap()).collect();
        let r = distortion(&inverse, &source, &target).unwrap();
        prop_assert!((r.distortion - 1.0).abs() < 1e-12);
        prop_assert!((r.lip - scale).abs() < 1e-9 * scale);
    }

    #[test]
    fn moduli_sandwich_every_pair(size in 2usize..9, codomain in 1usize..6, seed: u64) {
        let source = random_space(size, 2, 2.0, seed);
        let target = random_space(codomain, 2, 2.0, seed ^ 7);
        let mut rng = derived_rng(seed, 3);
        let map: Vec<usize> = (0..size).map(|_| rng.random_range(0..codomain)).collect();
        let t = moduli(&map, &source, &target).unwrap();
        for x in 0..size {
            for y in 0..size {
                if x == y {
                    continue;
                }
                let (d, image) = (source.dist(x, y), target.dist(map[x], map[y]));
                let image = if map[x] == map[y] { 0.0 } else { image };
                prop_assert!(t.omega_at(d) <= image + 1e-12);
                prop_assert!(image <= t.big_omega_at(d) + 1e-12);
            }
        }
    }

    #[test]
    fn point_maps_stay_in_range(n in 1usize..3, m in 2usize..6, codomain in 1usize..5, seed: u64) {
        let d = TorusDomain::new(n, m).unwrap();
        let f = PointMap::random(d, codomain, &mut derived_rng(seed, 4));
        prop_assert!(f.values.iter().all(|&v| v < codomain));
    }
}
