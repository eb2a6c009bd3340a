use metric_cotype::field::{MetricField, PointMap, VectorField};
use metric_cotype::harmonic::apply_symbol;
use metric_cotype::metric::{FiniteMetricSpace, TorusDomain};
use metric_cotype::numeric::{derived_rng, Norm};
use metric_cotype::smoothing::{
    adversarial_search, check_lemma_approx_metric, lemma_checks, smoothing_apply, smoothing_set, smoothing_symbol,
    AdversarialTarget,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

/// `(n, m, k)` with odd `k` and `2k < m`.
fn cell() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=3, 3usize..=5, 0usize..=1)
        .prop_map(|(n, half, k)| (n, 2 * half, 2 * k + 1))
        .prop_filter("2k < m", |&(_, m, k)| 2 * k < m)
}

fn field(n: usize, m: usize, dim: usize, seed: u64) -> VectorField {
    VectorField::gaussian(TorusDomain::new(n, m).unwrap(), dim, &mut derived_rng(seed, 0))
}

#[test]
fn index_set_cardinality_and_membership() {
    for n in 1..=4usize {
        for k in [1usize, 3, 5] {
            let d = TorusDomain::new(n, 2 * k + 2).unwrap();
            for j in 0..n {
                let s = smoothing_set(j, k, &d).unwrap();
                assert_eq!(s.len(), k * (k + 1).pow(n as u32 - 1));
                // Scan a box one wider than the set and test the congruences directly.
                let side = 2 * k as i64 + 3;
                for code in 0..side.pow(n as u32) {
                    let y: Vec<i64> = (0..n).map(|l| (code / side.pow(l as u32)) % side - k as i64 - 1).collect();
                    let expected = y.iter().enumerate().all(|(l, &c)| c.abs() <= k as i64 && (c % 2 == 0) == (l == j));
                    assert_eq!(s.contains(&y), expected, "{y:?}");
                    assert_eq!(s.members.contains(&y), expected, "{y:?}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn smoothing_is_the_window_average((n, m, k) in cell(), j in 0usize..3, seed: u64) {
        let j = j % n;
        let f = field(n, m, 2, seed);
        let d = f.domain;
        let set = smoothing_set(j, k, &d).unwrap();
        let smooth = smoothing_apply(&f, j, k).unwrap();
        for x in 0..d.size() {
            let mut acc = [Complex64::new(0.0, 0.0); 2];
            let mut largest: f64 = 0.0;
            for y in &set.members {
                let v = f.at(d.shift(x, y));
                acc[0] += v[0];
                acc[1] += v[1];
                largest = largest.max((v[0].norm_sqr() + v[1].norm_sqr()).sqrt());
            }
            let w = set.normalization();
            let got = smooth.at(x);
            prop_assert!((got[0] - acc[0] * w).norm() + (got[1] - acc[1] * w).norm() <= 1e-12 * f.scale());
            prop_assert!((got[0].norm_sqr() + got[1].norm_sqr()).sqrt() <= largest * (1.0 + 1e-12));
        }
        let spectral = apply_symbol(&f, |freq| smoothing_symbol(freq, j, k, m).into());
        prop_assert!(smooth.max_dist(&spectral) <= 1e-10 * f.scale());
    }

    #[test]
    fn smoothing_fixes_constants((n, m, k) in cell(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let d = TorusDomain::new(n, m).unwrap();
        let v = [Complex64::new(re, im)];
        let c = VectorField::constant(d, &v);
        for j in 0..n {
            prop_assert!(smoothing_apply(&c, j, k).unwrap().max_dist(&c) <= 1e-12 * (1.0 + v[0].norm()));
        }
    }

    #[test]
    fn smoothing_lemmas_hold_on_random_fields((n, m, k) in cell(), p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]), dim in 1usize..3, seed: u64) {
        let f = field(n, m, dim, seed);
        for c in lemma_checks(&f, &Norm::l2(dim), k, p).unwrap() {
            prop_assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn smoothing_lemmas_hold_in_other_norms((n, m, k) in cell(), r in 1.0f64..6.0, seed: u64) {
        let f = field(n, m, 2, seed);
        for c in lemma_checks(&f, &Norm::new(r, 2).unwrap(), k, 1.0).unwrap() {
            prop_assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn metric_form_of_the_approximation((n, m, k) in cell(), size in 2usize..8, p in 1.0f64..3.0, seed: u64) {
        let mut rng = derived_rng(seed, 1);
        let points: Vec<Vec<Complex64>> = (0..size).map(|_| vec![Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))]).collect();
        let space = FiniteMetricSpace::from_points(&points, Norm::l2(1)).unwrap();
        let f = PointMap::random(TorusDomain::new(n, m).unwrap(), size, &mut rng);
        let field = MetricField::new(&f, &space).unwrap();
        for j in 0..n {
            let c = check_lemma_approx_metric(&field, j, k, p).unwrap();
            prop_assert!(c.pass, "{c:?}");
        }
    }
}

#[test]
fn short_adversarial_searches_find_nothing() {
    let d = TorusDomain::new(2, 6).unwrap();
    let norm = Norm::l2(1);
    for target in [AdversarialTarget::Approx { j: 0 }, AdversarialTarget::Cancellation { eps: vec![1, -1] }] {
        let r = adversarial_search(d, &norm, 1, 2.0, target, 4, 60, 5).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.max_ratio <= 1.0);
    }
}
