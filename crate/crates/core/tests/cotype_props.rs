use std::f64::consts::PI;

use metric_cotype::cotype::{
    b_quantity, cotype_functionals, gamma_exhaustive_two_point, gamma_hilbert_exact, gamma_search, axis_edge_check,
    distortion_lower_bound, rademacher_average, CotypeOptions,
};
use metric_cotype::field::{MetricField, NormedField, PointMap, VectorField};
use metric_cotype::metric::{distortion_of, FiniteMetricSpace, PointCloud, TorusDomain};
use metric_cotype::numeric::{derived_rng, Norm};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian_vec(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

fn l2_points(size: usize, dim: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = derived_rng(seed, 0);
    let points: Vec<Vec<Complex64>> = (0..size).map(|_| gaussian_vec(dim, &mut rng)).collect();
    FiniteMetricSpace::from_points(&points, Norm::l2(dim)).unwrap()
}

fn random_metric(size: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = derived_rng(seed, 9);
    let p = rng.random_range(1.0..4.0);
    let points: Vec<Vec<Complex64>> =
        (0..size).map(|_| (0..2).map(|_| Complex64::new(rng.random_range(-3.0..3.0), 0.0)).collect()).collect();
    FiniteMetricSpace::from_points(&points, Norm::new(p, 2).unwrap()).unwrap()
}

/// Even `m` with `m^n <= 16`: every shape the two-point enumeration accepts.
const ENUMERABLE: [(usize, usize); 11] =
    [(1, 2), (1, 4), (1, 6), (1, 8), (1, 10), (1, 12), (1, 14), (1, 16), (2, 2), (2, 4), (3, 2)];

#[test]
fn hilbert_value_is_the_best_character() {
    // Oracle: evaluate the functionals of every character W_k directly.
    for (n, m) in [(1, 4), (1, 6), (2, 4), (2, 6), (3, 4), (2, 8)] {
        let d = TorusDomain::new(n, m).unwrap();
        let v = [Complex64::new(1.0, 0.0)];
        let best = (1..d.size())
            .map(|k| {
                let f = VectorField::character(d, &d.coords(k), &v);
                cotype_functionals(&NormedField::new(&f, Norm::l2(1)).unwrap(), 2.0, 2.0, CotypeOptions::default())
                    .unwrap()
                    .gamma_hat
            })
            .fold(0.0, f64::max);
        let exact = gamma_hilbert_exact(n, m).unwrap().value;
        assert!((best - exact).abs() < 1e-12, "n={n} m={m}: {best} vs {exact}");
    }
}

#[test]
fn real_part_of_the_argmax_character_attains_the_value() {
    for (n, m) in [(1, 4), (2, 4), (2, 8), (3, 6), (4, 4)] {
        let d = TorusDomain::new(n, m).unwrap();
        let g = gamma_hilbert_exact(n, m).unwrap();
        let mut rng = derived_rng(n as u64, m as u64);
        let v = gaussian_vec(3, &mut rng);
        let f = VectorField::from_fn(d, 3, |x| {
            let w = metric_cotype::harmonic::walsh_char(&g.argmax, x, &d).re;
            v.iter().map(|c| c * w).collect()
        });
        let r = cotype_functionals(&NormedField::new(&f, Norm::l2(3)).unwrap(), 2.0, 2.0, CotypeOptions::default()).unwrap();
        assert!((r.gamma_hat - g.value).abs() < 1e-6, "n={n} m={m}");
    }
}

#[test]
fn hilbert_value_below_sqrt6_over_pi() {
    let bound = 6f64.sqrt() / PI;
    for n in 1..=8usize {
        for m in (4..=48).step_by(4) {
            if (m as f64) >= 2.0 / 3.0 * PI * (n as f64).sqrt() {
                assert!(gamma_hilbert_exact(n, m).unwrap().value <= bound + 1e-12, "n={n} m={m}");
            }
        }
    }
}

#[test]
fn exhaustive_values_monotone_in_m_multiples() {
    for (n, m) in ENUMERABLE {
        for k in 2..=8usize {
            let km = k * m;
            if km.pow(n as u32) > 16 {
                break;
            }
            for (p, q) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 4.0)] {
                let big = gamma_exhaustive_two_point(n, km, p, q).unwrap().gamma_hat;
                let small = gamma_exhaustive_two_point(n, m, p, q).unwrap().gamma_hat;
                assert!(big <= small * (1.0 + 1e-9), "n={n} m={m} k={k} p={p} q={q}");
            }
        }
    }
}

#[test]
fn exhaustive_values_obey_padding() {
    for &(n, m) in &ENUMERABLE {
        for &(k, m2) in &ENUMERABLE {
            if m2 != m || k >= n {
                continue;
            }
            for (p, q) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 4.0)] {
                let low = gamma_exhaustive_two_point(k, m, p, q).unwrap().gamma_hat;
                let high = gamma_exhaustive_two_point(n, m, p, q).unwrap().gamma_hat;
                let factor = (n as f64 / k as f64).powf(1.0 - p / q);
                assert!(low <= factor * high * (1.0 + 1e-9), "k={k} n={n} m={m} p={p} q={q}");
            }
        }
    }
}

#[test]
fn identity_witness_attains_b_equal_one() {
    for (n, m) in [(1, 4), (1, 8), (2, 4), (2, 6), (2, 8), (3, 4)] {
        let d = TorusDomain::new(n, m).unwrap();
        let id = PointMap::identity(d);
        for ell in (2..=m / 2).step_by(2) {
            let b = b_quantity(&MetricField::new(&id, &d).unwrap(), ell).unwrap();
            assert!((b.b_hat - 1.0).abs() < 1e-12, "n={n} m={m} ell={ell}: {}", b.b_hat);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampled_witnesses_never_beat_the_enumeration(idx in 0usize..ENUMERABLE.len(), pq in 0usize..3, seed: u64) {
        let (n, m) = ENUMERABLE[idx];
        let (p, q) = [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0)][pq];
        let sup = gamma_exhaustive_two_point(n, m, p, q).unwrap().gamma_hat;
        let two = FiniteMetricSpace::two_point(1.0);
        let d = TorusDomain::new(n, m).unwrap();
        let mut rng = derived_rng(seed, 1);
        for _ in 0..8 {
            let f = PointMap::random(d, 2, &mut rng);
            let r = cotype_functionals(&MetricField::new(&f, &two).unwrap(), p, q, CotypeOptions::default()).unwrap();
            prop_assert!(r.gamma_hat <= sup * (1.0 + 1e-9));
        }
    }

    #[test]
    fn search_in_hilbert_space_stays_below_exact(n in 1usize..=2, half in 1usize..=3, size in 2usize..8, seed: u64) {
        let m = 2 * half;
        let space = l2_points(size, 3, seed);
        let r = gamma_search(&space, n, m, 2.0, 2.0, 2_000, seed).unwrap();
        prop_assert!(r.gamma_hat <= gamma_hilbert_exact(n, m).unwrap().value + 1e-9);
    }

    #[test]
    fn axis_edges_bounded_by_sigma_edges(n in 1usize..=3, half in 1usize..=4, size in 2usize..10, p in 1.0f64..3.0, seed: u64) {
        let d = TorusDomain::new(n, 2 * half).unwrap();
        let space = random_metric(size, seed);
        let f = PointMap::random(d, size, &mut derived_rng(seed, 2));
        let c = axis_edge_check(&MetricField::new(&f, &space).unwrap(), p).unwrap();
        prop_assert!(c.pass, "{c:?}");
    }

    #[test]
    fn contraction_principle(count in 1usize..8, dim in 1usize..4, p in 1.0f64..4.0, r in 1.0f64..6.0, seed: u64) {
        let mut rng = derived_rng(seed, 3);
        let vectors: Vec<Vec<Complex64>> = (0..count).map(|_| gaussian_vec(dim, &mut rng)).collect();
        let scaled: Vec<Vec<Complex64>> = vectors
            .iter()
            .map(|v| {
                let a: f64 = rng.random_range(-1.0..=1.0);
                v.iter().map(|c| c * a).collect()
            })
            .collect();
        let norm = Norm::new(r, dim).unwrap();
        let full = rademacher_average(&vectors, p, &norm).unwrap();
        prop_assert!(rademacher_average(&scaled, p, &norm).unwrap() <= full * (1.0 + 1e-12));
    }

    #[test]
    fn b_at_most_one(n in 1usize..=3, half in 2usize..=4, ell_half in 1usize..=2, size in 2usize..8, seed: u64) {
        let d = TorusDomain::new(n, 2 * half).unwrap();
        let space = random_metric(size, seed);
        let f = PointMap::random(d, size, &mut derived_rng(seed, 4));
        let b = b_quantity(&MetricField::new(&f, &space).unwrap(), 2 * ell_half).unwrap();
        prop_assert!(b.b_hat >= 0.0 && b.b_hat <= 1.0 + 1e-9);
    }

    #[test]
    fn injections_into_hilbert_space_respect_the_distortion_bound(n in 1usize..=2, half in 2usize..=4, dim in 1usize..5, seed: u64) {
        let m = 2 * half;
        let d = TorusDomain::new(n, m).unwrap();
        let mut rng = derived_rng(seed, 5);
        let cloud = PointCloud { points: (0..d.size()).map(|_| gaussian_vec(dim, &mut rng)).collect(), norm: Norm::l2(dim) };
        let map: Vec<usize> = (0..d.size()).collect();
        let dist = distortion_of(&map, &d, &cloud).unwrap().distortion;
        let bound = distortion_lower_bound(n as f64, 2.0, gamma_hilbert_exact(n, m).unwrap().value).unwrap();
        prop_assert!(dist >= bound * (1.0 - 1e-12));
    }
}
