//! The cotype functionals on `Z_m^n`, exact values for Hilbert targets,
//! extremal searches over finite targets and the `B(M; n, ℓ)` quantity.

mod bounds;
mod exhaustive;
mod linear;
mod witness_search;

pub use bounds::{dimension_growth_bound, distortion_lower_bound, m_parameter_experiment, MExperiment, MTarget, ScanStep};
pub use exhaustive::{b_quantity_exhaustive, gamma_exhaustive_two_point, MAX_EXHAUSTIVE_SITES};
pub use linear::{
    linear_exponential_witness, rademacher_average, rademacher_cotype_ratio, LinearExponentialCheck,
};
pub use witness_search::{
    b_quantity, b_quantity_search, gamma_search, gamma_search_with, axis_edge_check, mod_inequality_check,
    tensor_submultiplicativity_check, BReport, SearchConfig, SubmultiplicativityMode, B_TOLERANCE,
};

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldDistance, GridFunction};
use crate::metric::TorusDomain;
use crate::numeric::{binomial, derived_rng, pairwise_mean, pairwise_sum, powp};

/// How a reported quantity was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Full enumeration of every average in the functional.
    Exact,
    /// Exact functional, maximized over every map in the search space.
    Exhaustive,
    /// Stochastic estimate; values are lower bounds or carry standard errors.
    Sampled,
}

/// Standard errors of a stratified estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingStats {
    pub samples: u64,
    pub lhs_se: f64,
    pub rhs_se: f64,
}

/// Both sides of the cotype inequality for one witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CotypeReport {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub lhs: f64,
    pub rhs_raw: f64,
    pub gamma_hat: f64,
    /// Set when `rhs_raw = 0`; `gamma_hat` is then reported as 0.
    pub degenerate: bool,
    pub mode: EvalMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sampling: Option<SamplingStats>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub budget: Option<u64>,
    pub witness: GridFunction,
}

/// Evaluation limits for the functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CotypeOptions {
    /// Exact evaluation when `3^n · m^n` is at most this; otherwise this
    /// many stratified samples.
    pub budget: u64,
    pub seed: u64,
}

impl Default for CotypeOptions {
    fn default() -> Self {
        Self { budget: 1 << 26, seed: 0 }
    }
}

pub(crate) fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p >= 1.0 && q >= p && q.is_finite()) {
        return Err(Error::InvalidExponents { p, q });
    }
    Ok(())
}

pub(crate) fn check_even(m: usize) -> Result<()> {
    if !m.is_multiple_of(2) {
        return Err(Error::OddM(m));
    }
    Ok(())
}

/// `(lhs / (m^p · n^{1-p/q} · rhs))^{1/p}`, or `None` when `rhs = 0`.
pub fn gamma_from_sides(lhs: f64, rhs: f64, n: usize, m: usize, p: f64, q: f64) -> Option<f64> {
    if rhs <= 0.0 {
        return None;
    }
    let weight = (n as f64).powf(1.0 - p / q);
    Some((lhs / (powp(m as f64, p) * weight * rhs)).powf(1.0 / p))
}

/// `avg_x d(f(x + s), f(x))^p` for the shift table of `s`.
pub(crate) fn shift_mean<F: FieldDistance + ?Sized>(field: &F, table: &[usize], p: f64) -> f64 {
    let row: Vec<f64> = (0..table.len()).into_par_iter().map(|x| powp(field.dist(table[x], x), p)).collect();
    pairwise_mean(&row)
}

/// `Σ_j avg_x d(f(x + r e_j), f(x))^p`.
pub(crate) fn axis_sum<F: FieldDistance + ?Sized>(field: &F, r: i64, p: f64) -> f64 {
    let d = field.domain();
    let parts: Vec<f64> = (0..d.n).map(|j| shift_mean(field, &d.shift_table(&d.axis(j, r)), p)).collect();
    pairwise_sum(&parts)
}

/// `E_{ε ∈ {-1,1}^n} avg_x d(f(x + ε), f(x))^p`.
pub(crate) fn sign_edge_mean<F: FieldDistance + ?Sized>(field: &F, p: f64) -> f64 {
    let d = field.domain();
    let parts: Vec<f64> = d.sign_vectors().iter().map(|e| shift_mean(field, &d.shift_table(e), p)).collect();
    pairwise_mean(&parts)
}

/// `(1/3^n) Σ_{ε ∈ {-1,0,1}^n} avg_x d(f(x + ε), f(x))^p`.
pub(crate) fn sigma_edge_mean<F: FieldDistance + ?Sized>(field: &F, p: f64) -> f64 {
    let d = field.domain();
    let parts: Vec<f64> = d
        .ternary_vectors()
        .iter()
        .map(|e| if e.iter().all(|&c| c == 0) { 0.0 } else { shift_mean(field, &d.shift_table(e), p) })
        .collect();
    pairwise_mean(&parts)
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let mean = pairwise_mean(values);
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, pairwise_sum(&sq) / (values.len() - 1) as f64)
}

/// Stratified estimate of the `σ`-average: stratum `z` holds the shifts with
/// exactly `z` zero coordinates and has weight `C(n,z) 2^{n-z} / 3^n`.
fn sampled_sigma_edge_mean<F: FieldDistance + ?Sized>(field: &F, p: f64, samples: u64, seed: u64) -> (f64, f64, u64) {
    let d = field.domain();
    let n = d.n;
    let total = 3f64.powi(n as i32);
    let mut estimate = 0.0;
    let mut variance = 0.0;
    let mut used = 0;
    for z in 0..n {
        let weight = binomial(n as u64, z as u64) as f64 * 2f64.powi((n - z) as i32) / total;
        let count = ((samples as f64 * weight).round() as u64).max(2);
        let mut rng = derived_rng(seed, 1 + z as u64);
        let values: Vec<f64> = (0..count)
            .map(|_| {
                let zeros = sample_indices(&mut rng, n, z);
                let mut eps: Vec<i64> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
                for i in zeros.iter() {
                    eps[i] = 0;
                }
                let x = rng.random_range(0..d.size());
                powp(field.dist(d.shift(x, &eps), x), p)
            })
            .collect();
        let (mean, var) = mean_and_var(&values);
        estimate += weight * mean;
        variance += weight * weight * var / count as f64;
        used += count;
    }
    (estimate, variance.sqrt(), used)
}

fn sampled_axis_sum<F: FieldDistance + ?Sized>(field: &F, p: f64, samples: u64, seed: u64) -> (f64, f64) {
    let d = field.domain();
    let per_axis = (samples / d.n as u64).max(2);
    let mut rng = derived_rng(seed, 0);
    let mut estimate = 0.0;
    let mut variance = 0.0;
    for j in 0..d.n {
        let shift = d.axis(j, (d.m / 2) as i64);
        let values: Vec<f64> = (0..per_axis)
            .map(|_| {
                let x = rng.random_range(0..d.size());
                powp(field.dist(d.shift(x, &shift), x), p)
            })
            .collect();
        let (mean, var) = mean_and_var(&values);
        estimate += mean;
        variance += var / per_axis as f64;
    }
    (estimate, variance.sqrt())
}

/// Evaluates both sides of the cotype inequality for the map behind
/// `field`. Exact when `3^n · m^n <= budget`, stratified sampling otherwise.
pub fn cotype_functionals<F: FieldDistance + ?Sized>(field: &F, p: f64, q: f64, opts: CotypeOptions) -> Result<CotypeReport> {
    check_exponents(p, q)?;
    let d: TorusDomain = field.domain();
    check_even(d.m)?;
    let work = 3u128.pow(d.n as u32) * d.size() as u128;
    let (lhs, rhs_raw, mode, sampling, seed) = if work <= opts.budget as u128 {
        (axis_sum(field, (d.m / 2) as i64, p), sigma_edge_mean(field, p), EvalMode::Exact, None, None)
    } else {
        let (lhs, lhs_se) = if (d.n * d.size()) as u128 <= opts.budget as u128 {
            (axis_sum(field, (d.m / 2) as i64, p), 0.0)
        } else {
            sampled_axis_sum(field, p, opts.budget, opts.seed)
        };
        let (rhs, rhs_se, samples) = sampled_sigma_edge_mean(field, p, opts.budget, opts.seed);
        (lhs, rhs, EvalMode::Sampled, Some(SamplingStats { samples, lhs_se, rhs_se }), Some(opts.seed))
    };
    let gamma = gamma_from_sides(lhs, rhs_raw, d.n, d.m, p, q);
    Ok(CotypeReport {
        n: d.n,
        m: d.m,
        p,
        q,
        lhs,
        rhs_raw,
        gamma_hat: gamma.unwrap_or(0.0),
        degenerate: gamma.is_none(),
        mode,
        sampling,
        seed,
        budget: None,
        witness: field.witness(),
    })
}

/// Exact `Γ_2(H; n, m)` and a maximizing frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertGamma {
    pub n: usize,
    pub m: usize,
    pub value: f64,
    pub argmax: Vec<usize>,
}

/// `sqrt(4·odd(k) / (m²·D(k)))` with `D(k) = 2 − 2 Π_j (1 + 2cos(2πk_j/m))/3`:
/// the cotype ratio of the character `W_k` into a Hilbert space.
pub fn hilbert_ratio(k: &[usize], m: usize) -> f64 {
    let odd = k.iter().filter(|&&c| c % 2 == 1).count();
    if odd == 0 {
        return 0.0;
    }
    let product: f64 = k
        .iter()
        .map(|&c| (1.0 + 2.0 * crate::harmonic::root_of_unity(c as i64, m).re) / 3.0)
        .product();
    (4.0 * odd as f64 / ((m * m) as f64 * (2.0 - 2.0 * product))).sqrt()
}

/// Both quadratic forms of the cotype inequality are diagonal in the
/// characters, so `Γ_2(H; n, m)` is the largest `hilbert_ratio(k)` over
/// `k ≠ 0`. The ratio is invariant under permuting coordinates and under
/// `k_j ↦ m − k_j`, so only sorted `k` with entries in `[0, m/2]` are
/// scanned. Among ties the sorted representative with the smallest index is
/// returned.
pub fn gamma_hilbert_exact(n: usize, m: usize) -> Result<HilbertGamma> {
    check_even(m)?;
    if n == 0 {
        return Err(Error::PreconditionViolation("n must be positive".into()));
    }
    let half = m / 2;
    let mut best = HilbertGamma { n, m, value: 0.0, argmax: vec![0; n] };
    let mut k = vec![0usize; n];
    // Nondecreasing sequences in lexicographic order.
    loop {
        let mut i = n;
        while i > 0 && k[i - 1] == half {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        k[i - 1] += 1;
        let v = k[i - 1];
        for slot in k.iter_mut().skip(i) {
            *slot = v;
        }
        let r = hilbert_ratio(&k, m);
        let tie = (r - best.value).abs() <= 1e-12 * best.value;
        if r > best.value && !tie {
            best.value = r;
            best.argmax = k.clone();
        }
    }
    if best.value == 0.0 {
        // m = 2 with no odd frequency cannot happen for n >= 1; kept for safety.
        best.argmax[n - 1] = 1;
        best.value = hilbert_ratio(&best.argmax, m);
    }
    Ok(best)
}

/// `n^{1/q} / (m (1 − 3^{-n})^{1/p})`: the `Γ` obtained by replacing both
/// sides by their expectations over a uniformly random two-valued map.
pub fn expected_random_gamma(n: usize, m: usize, p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    check_even(m)?;
    let n_f = n as f64;
    Ok(n_f.powf(1.0 / q) / (m as f64 * (1.0 - 3f64.powi(-(n as i32))).powf(1.0 / p)))
}

/// Monte-Carlo estimates over uniformly random maps `Z_m^n -> {u, v}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomGammaEstimate {
    pub trials: usize,
    pub closed_form: f64,
    /// `Γ` from the sample means of both sides (the closed form's quantity).
    pub ratio_of_means: f64,
    /// Delta-method standard error of `ratio_of_means`.
    pub ratio_se: f64,
    /// Plain average of the per-witness `gamma_hat` (degenerate ones skipped).
    pub mean_gamma_hat: f64,
    pub mean_gamma_se: f64,
    pub degenerate: usize,
}

pub fn random_two_point_estimate(n: usize, m: usize, p: f64, q: f64, trials: usize, seed: u64) -> Result<RandomGammaEstimate> {
    let closed_form = expected_random_gamma(n, m, p, q)?;
    let d = TorusDomain::new(n, m)?;
    let lhs_tables: Vec<Vec<usize>> = (0..n).map(|j| d.shift_table(&d.axis(j, (m / 2) as i64))).collect();
    let rhs_tables: Vec<Vec<usize>> = d.ternary_vectors().iter().map(|e| d.shift_table(e)).collect();
    let sides: Vec<(f64, f64)> = crate::search::run_restarts(trials, seed, |_, rng| {
        let f: Vec<bool> = (0..d.size()).map(|_| rng.random()).collect();
        let count = |t: &Vec<usize>| (0..d.size()).filter(|&x| f[t[x]] != f[x]).count() as f64 / d.size() as f64;
        let lhs: f64 = lhs_tables.iter().map(count).sum();
        let rhs: f64 = rhs_tables.iter().map(count).sum::<f64>() / rhs_tables.len() as f64;
        (lhs, rhs)
    });
    let ls: Vec<f64> = sides.iter().map(|s| s.0).collect();
    let rs: Vec<f64> = sides.iter().map(|s| s.1).collect();
    let (lm, _) = mean_and_var(&ls);
    let (rm, _) = mean_and_var(&rs);
    let rho = lm / rm;
    let resid: Vec<f64> = sides.iter().map(|(l, r)| l - rho * r).collect();
    let (_, resid_var) = mean_and_var(&resid);
    let rho_se = resid_var.sqrt() / (rm * (trials as f64).sqrt());
    let c = 1.0 / (powp(m as f64, p) * (n as f64).powf(1.0 - p / q));
    let ratio_of_means = (c * rho).powf(1.0 / p);
    let ratio_se = c.powf(1.0 / p) * rho.powf(1.0 / p - 1.0) / p * rho_se;
    let gammas: Vec<f64> = sides.iter().filter_map(|&(l, r)| gamma_from_sides(l, r, n, m, p, q)).collect();
    let (mean_gamma_hat, var) = mean_and_var(&gammas);
    Ok(RandomGammaEstimate {
        trials,
        closed_form,
        ratio_of_means,
        ratio_se,
        mean_gamma_hat,
        mean_gamma_se: (var / gammas.len() as f64).sqrt(),
        degenerate: trials - gammas.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{MetricField, NormedField, PointMap, VectorField};
    use crate::metric::FiniteMetricSpace;
    use crate::numeric::Norm;
    use num_complex::Complex64;

    #[test]
    fn scalar_exponential_on_z4() {
        let d = TorusDomain::new(1, 4).unwrap();
        let f = VectorField::from_fn(d, 1, |x| vec![crate::harmonic::root_of_unity(x[0] as i64, 4)]);
        let field = NormedField::new(&f, Norm::l2(1)).unwrap();
        let r = cotype_functionals(&field, 2.0, 2.0, CotypeOptions::default()).unwrap();
        assert!((r.lhs - 4.0).abs() < 1e-14);
        assert!((r.rhs_raw - 4.0 / 3.0).abs() < 1e-14);
        assert!((r.gamma_hat - 3f64.sqrt() / 4.0).abs() < 1e-14);
        assert_eq!(r.mode, EvalMode::Exact);
    }

    #[test]
    fn constant_and_parity_witnesses() {
        let d = TorusDomain::new(1, 4).unwrap();
        let two = FiniteMetricSpace::two_point(1.0);
        let constant = PointMap::constant(d, 0);
        let r = cotype_functionals(&MetricField::new(&constant, &two).unwrap(), 2.0, 2.0, CotypeOptions::default()).unwrap();
        assert!(r.degenerate && r.lhs == 0.0 && r.rhs_raw == 0.0 && r.gamma_hat == 0.0);
        let parity = PointMap::new(d, vec![0, 1, 0, 1], 2).unwrap();
        let r = cotype_functionals(&MetricField::new(&parity, &two).unwrap(), 1.0, 2.0, CotypeOptions::default()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = TorusDomain::new(1, 5).unwrap();
        let two = FiniteMetricSpace::two_point(1.0);
        let f = PointMap::constant(d, 0);
        let field = MetricField::new(&f, &two).unwrap();
        assert_eq!(cotype_functionals(&field, 2.0, 2.0, CotypeOptions::default()).unwrap_err(), Error::OddM(5));
        let d = TorusDomain::new(1, 4).unwrap();
        let f = PointMap::constant(d, 0);
        let field = MetricField::new(&f, &two).unwrap();
        assert!(matches!(
            cotype_functionals(&field, 3.0, 2.0, CotypeOptions::default()).unwrap_err(),
            Error::InvalidExponents { .. }
        ));
    }

    #[test]
    fn sampled_mode_tracks_exact_value() {
        let d = TorusDomain::new(3, 6).unwrap();
        let f = VectorField::gaussian(d, 2, &mut derived_rng(9, 0));
        let field = NormedField::new(&f, Norm::l2(2)).unwrap();
        let exact = cotype_functionals(&field, 2.0, 2.0, CotypeOptions::default()).unwrap();
        let sampled = cotype_functionals(&field, 2.0, 2.0, CotypeOptions { budget: 4000, seed: 3 }).unwrap();
        assert_eq!(sampled.mode, EvalMode::Sampled);
        let stats = sampled.sampling.unwrap();
        assert!((sampled.rhs_raw - exact.rhs_raw).abs() < 5.0 * stats.rhs_se);
        assert_eq!(sampled.lhs, exact.lhs);
    }

    #[test]
    fn hilbert_examples() {
        let g = gamma_hilbert_exact(1, 4).unwrap();
        assert!((g.value - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(g.argmax, vec![1]);
        let g = gamma_hilbert_exact(2, 4).unwrap();
        assert!((g.value - 3.0 / (4.0 * 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(g.argmax, vec![1, 1]);
        assert_eq!(gamma_hilbert_exact(2, 5).unwrap_err(), Error::OddM(5));
    }

    #[test]
    fn hilbert_scan_matches_full_enumeration() {
        for (n, m) in [(1, 6), (2, 6), (3, 4), (2, 8), (3, 6)] {
            let d = TorusDomain::new(n, m).unwrap();
            let brute = (1..d.size()).map(|k| hilbert_ratio(&d.coords(k), m)).fold(0.0, f64::max);
            let fast = gamma_hilbert_exact(n, m).unwrap().value;
            assert!((brute - fast).abs() < 1e-14, "n={n} m={m}");
        }
    }

    #[test]
    fn character_witness_attains_hilbert_ratio() {
        let d = TorusDomain::new(2, 6).unwrap();
        for k in 1..d.size() {
            let kc = d.coords(k);
            let f = VectorField::character(d, &kc, &[Complex64::new(1.0, 0.0)]);
            let r = cotype_functionals(&NormedField::new(&f, Norm::l2(1)).unwrap(), 2.0, 2.0, CotypeOptions::default())
                .unwrap();
            assert!((r.gamma_hat - hilbert_ratio(&kc, 6)).abs() < 1e-12, "k={kc:?}");
        }
    }

    #[test]
    fn random_gamma_closed_form() {
        let g = expected_random_gamma(1, 2, 2.0, 2.0).unwrap();
        assert!((g - 1.0 / (2.0 * (2.0f64 / 3.0).sqrt())).abs() < 1e-15);
        let big = expected_random_gamma(40, 4, 2.0, 2.0).unwrap();
        assert!((big - 40f64.sqrt() / 4.0).abs() < 1e-12);
    }
}
