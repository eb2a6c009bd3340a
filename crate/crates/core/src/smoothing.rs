//! The smoothing operator `E_j^{(k)}`, its index set `S(j, k)` and checks of
//! the two smoothing inequalities, with a hill climber that hunts for
//! counterexamples.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use crate::check::InequalityCheck;
use crate::check::params;
use crate::cotype::{check_even, shift_mean, sign_edge_mean};
use crate::error::{Error, Result};
use crate::field::{FieldDistance, NormedField, VectorField};
use crate::harmonic::{check_axis, delta_tilde, root_of_unity};
use crate::metric::{sign_vectors, TorusDomain};
use crate::numeric::{pairwise_mean, pairwise_sum, powp, Norm};
use crate::search::run_restarts;

/// `S(j, k)`: points of `[-k, k]^n` that are even in coordinate `j` and odd
/// in every other coordinate. Axes are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothingIndexSet {
    pub n: usize,
    pub j: usize,
    pub k: usize,
    pub members: Vec<Vec<i64>>,
}

impl SmoothingIndexSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `1 / (k (k+1)^{n-1})`.
    pub fn normalization(&self) -> f64 {
        1.0 / (self.k as f64 * ((self.k + 1) as f64).powi(self.n as i32 - 1))
    }

    pub fn contains(&self, y: &[i64]) -> bool {
        y.len() == self.n
            && y.iter().enumerate().all(|(l, &c)| {
                c.unsigned_abs() as usize <= self.k && (c.rem_euclid(2) == 0) == (l == self.j)
            })
    }
}

fn check_radius(k: usize, m: usize) -> Result<()> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenK(k));
    }
    if 2 * k >= m {
        return Err(Error::KTooLarge { k, half: m / 2 });
    }
    Ok(())
}

/// Even offsets `-(k-1), ..., k-1` and odd offsets `±1, ..., ±k`.
fn offsets(k: usize, even: bool) -> Vec<i64> {
    let k = k as i64;
    (-k..=k).filter(|c| (c.rem_euclid(2) == 0) == even).collect()
}

pub fn smoothing_set(j: usize, k: usize, domain: &TorusDomain) -> Result<SmoothingIndexSet> {
    check_axis(j, domain)?;
    check_radius(k, domain.m)?;
    let mut members = vec![Vec::new()];
    for l in 0..domain.n {
        let choices = offsets(k, l == j);
        members = members
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                choices.iter().map(move |&c| {
                    let mut y = prefix.clone();
                    y.push(c);
                    y
                })
            })
            .collect();
    }
    Ok(SmoothingIndexSet { n: domain.n, j, k, members })
}

/// Largest odd `k < m/2`.
pub fn default_k(m: usize) -> Result<usize> {
    let half = m / 2;
    if half < 2 {
        return Err(Error::KTooLarge { k: 1, half });
    }
    Ok(if half.is_multiple_of(2) { half - 1 } else { half - 2 })
}

fn axis_average(f: &VectorField, axis: usize, offs: &[i64]) -> VectorField {
    let d = f.domain;
    let tables: Vec<Vec<usize>> = offs.iter().map(|&o| d.shift_table(&d.axis(axis, o))).collect();
    let w = 1.0 / offs.len() as f64;
    let mut out = VectorField::zeros(d, f.dim);
    for x in 0..d.size() {
        let acc = out.at_mut(x);
        for t in &tables {
            for (a, v) in acc.iter_mut().zip(f.at(t[x])) {
                *a += v;
            }
        }
        for a in acc.iter_mut() {
            *a *= w;
        }
    }
    out
}

/// `E_j^{(k)} f(x)`: the average of `f(x + y)` over `y ∈ S(j, k)`. The set is
/// a product of one-dimensional offset sets, so the average is taken one
/// axis at a time.
pub fn smoothing_apply(f: &VectorField, j: usize, k: usize) -> Result<VectorField> {
    check_axis(j, &f.domain)?;
    check_radius(k, f.domain.m)?;
    let mut out = f.clone();
    for l in 0..f.domain.n {
        out = axis_average(&out, l, &offsets(k, l == j));
    }
    Ok(out)
}

/// Multiplier of `E_j^{(k)}` on the character with frequency `freq`.
pub fn smoothing_symbol(freq: &[usize], j: usize, k: usize, m: usize) -> f64 {
    freq.iter()
        .enumerate()
        .map(|(l, &c)| {
            let offs = offsets(k, l == j);
            offs.iter().map(|&o| root_of_unity(c as i64 * o, m).re).sum::<f64>() / offs.len() as f64
        })
        .product()
}

fn norm_mean(field: &VectorField, norm: &Norm, p: f64) -> f64 {
    let values: Vec<f64> = (0..field.domain.size()).map(|x| powp(norm.norm(field.at(x)), p)).collect();
    pairwise_mean(&values)
}

fn check_norm(f: &VectorField, norm: &Norm) -> Result<()> {
    if f.dim != norm.dim {
        return Err(Error::DimensionMismatch { expected: norm.dim, got: f.dim });
    }
    check_even(f.domain.m)
}

fn approx_rhs<F: FieldDistance + ?Sized>(field: &F, j: usize, k: usize, p: f64) -> f64 {
    let d = field.domain();
    let edges = sign_edge_mean(field, p);
    let axis = shift_mean(field, &d.shift_table(&d.axis(j, 1)), p);
    powp(2.0 * k as f64, p) * edges + powp(2.0, p - 1.0) * axis
}

fn approx_params(d: &TorusDomain, j: usize, k: usize, p: f64, form: &str) -> String {
    params(&[
        ("n", d.n.to_string()),
        ("m", d.m.to_string()),
        ("j", j.to_string()),
        ("k", k.to_string()),
        ("p", p.to_string()),
        ("form", form.to_string()),
    ])
}

/// `avg_x ‖E_j^{(k)} f(x) − f(x)‖^p` against
/// `(2k)^p E_ε avg_x ‖f(x+ε) − f(x)‖^p + 2^{p−1} avg_x ‖f(x+e_j) − f(x)‖^p`.
pub fn check_lemma_approx(f: &VectorField, norm: &Norm, j: usize, k: usize, p: f64) -> Result<InequalityCheck> {
    check_norm(f, norm)?;
    let smooth = smoothing_apply(f, j, k)?;
    Ok(approx_from_smoothed(f, &smooth, norm, j, k, p))
}

fn approx_from_smoothed(f: &VectorField, smooth: &VectorField, norm: &Norm, j: usize, k: usize, p: f64) -> InequalityCheck {
    let lhs = norm_mean(&smooth.sub(f), norm, p);
    let field = NormedField { f, norm: *norm };
    let rhs = approx_rhs(&field, j, k, p);
    InequalityCheck::new("smoothing-approx", approx_params(&f.domain, j, k, p, "normed"), lhs, rhs, powp(2.0 * f.scale(), p))
}

/// Metric form: `avg_x avg_{y ∈ S(j,k)} d(f(x+y), f(x))^p` against the same
/// right-hand side. By convexity it dominates the normed left-hand side.
pub fn check_lemma_approx_metric<F: FieldDistance + ?Sized>(field: &F, j: usize, k: usize, p: f64) -> Result<InequalityCheck> {
    let d = field.domain();
    check_even(d.m)?;
    let set = smoothing_set(j, k, &d)?;
    let mut scale: f64 = 0.0;
    let parts: Vec<f64> = set
        .members
        .iter()
        .map(|y| {
            let table = d.shift_table(y);
            let row: Vec<f64> = (0..d.size())
                .map(|x| {
                    let v = field.dist(table[x], x);
                    scale = scale.max(v);
                    powp(v, p)
                })
                .collect();
            pairwise_mean(&row)
        })
        .collect();
    let lhs = pairwise_mean(&parts);
    let rhs = approx_rhs(field, j, k, p);
    Ok(InequalityCheck::new("smoothing-approx", approx_params(&d, j, k, p, "metric"), lhs, rhs, powp(scale, p)))
}

/// `∂̃_j E_j^{(k)} f` for every axis, shared by all sign patterns.
fn cancellation_terms(f: &VectorField, k: usize) -> Result<Vec<VectorField>> {
    (0..f.domain.n).map(|j| delta_tilde(&smoothing_apply(f, j, k)?, j)).collect()
}

fn cancellation_from_terms(
    f: &VectorField,
    terms: &[VectorField],
    norm: &Norm,
    k: usize,
    p: f64,
    eps: &[i64],
) -> InequalityCheck {
    let d = f.domain;
    let n = d.n;
    let mut combined = VectorField::zeros(d, f.dim);
    for (t, &e) in terms.iter().zip(eps) {
        for (a, v) in combined.values.iter_mut().zip(&t.values) {
            *a += v * e as f64;
        }
    }
    let lhs = norm_mean(&combined, norm, p);
    let neg: Vec<i64> = eps.iter().map(|e| -e).collect();
    let diag = norm_mean(&f.translate(eps).sub(&f.translate(&neg)), norm, p);
    let field = NormedField { f, norm: *norm };
    let axes: Vec<f64> = (0..n).map(|j| shift_mean(&field, &d.shift_table(&d.axis(j, 1)), p)).collect();
    let constant = powp(24.0, p) * (n as f64).powf(2.0 * p - 1.0) / powp(k as f64, p);
    let rhs = powp(3.0, p - 1.0) * diag + constant * pairwise_sum(&axes);
    let eps_text = eps.iter().map(|e| if *e > 0 { "+" } else { "-" }).collect::<String>();
    let text = params(&[
        ("n", n.to_string()),
        ("m", d.m.to_string()),
        ("k", k.to_string()),
        ("p", p.to_string()),
        ("eps", eps_text),
    ]);
    InequalityCheck::new("smoothing-cancellation", text, lhs, rhs, powp(2.0 * n as f64 * f.scale(), p))
}

fn check_signs(eps: &[i64], n: usize) -> Result<()> {
    if eps.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: eps.len() });
    }
    if eps.iter().any(|e| e.abs() != 1) {
        return Err(Error::PreconditionViolation(format!("{eps:?} is not in {{-1,1}}^n")));
    }
    Ok(())
}

/// `avg_x ‖Σ_j ε_j (E_j^{(k)} f(x+e_j) − E_j^{(k)} f(x−e_j))‖^p` against
/// `3^{p−1} avg_x ‖f(x+ε) − f(x−ε)‖^p + (24^p n^{2p−1} / k^p) Σ_j avg_x ‖f(x+e_j) − f(x)‖^p`.
pub fn check_lemma_cancellation(f: &VectorField, norm: &Norm, k: usize, p: f64, eps: &[i64]) -> Result<InequalityCheck> {
    check_norm(f, norm)?;
    check_signs(eps, f.domain.n)?;
    check_radius(k, f.domain.m)?;
    let terms = cancellation_terms(f, k)?;
    Ok(cancellation_from_terms(f, &terms, norm, k, p, eps))
}

/// Every approximation check (one per axis) followed by every cancellation
/// check (one per sign pattern, in lexicographic order).
pub fn lemma_checks(f: &VectorField, norm: &Norm, k: usize, p: f64) -> Result<Vec<InequalityCheck>> {
    check_norm(f, norm)?;
    check_radius(k, f.domain.m)?;
    let mut out = Vec::new();
    let mut terms = Vec::with_capacity(f.domain.n);
    for j in 0..f.domain.n {
        let smooth = smoothing_apply(f, j, k)?;
        out.push(approx_from_smoothed(f, &smooth, norm, j, k, p));
        terms.push(delta_tilde(&smooth, j)?);
    }
    for eps in sign_vectors(f.domain.n) {
        out.push(cancellation_from_terms(f, &terms, norm, k, p, &eps));
    }
    Ok(out)
}

/// Which inequality an adversarial search attacks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "lemma")]
pub enum AdversarialTarget {
    Approx { j: usize },
    Cancellation { eps: Vec<i64> },
}

impl AdversarialTarget {
    fn evaluate(&self, f: &VectorField, norm: &Norm, k: usize, p: f64) -> Result<InequalityCheck> {
        match self {
            AdversarialTarget::Approx { j } => check_lemma_approx(f, norm, *j, k, p),
            AdversarialTarget::Cancellation { eps } => check_lemma_cancellation(f, norm, k, p, eps),
        }
    }
}

/// Outcome of an adversarial search. Finding no violation is evidence, not
/// a proof, that the inequality holds at these parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialReport {
    pub target: AdversarialTarget,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Largest `lhs / rhs` reached over all restarts.
    pub max_ratio: f64,
    /// Restarts that ended on a failing check.
    pub violations: usize,
    /// Final check of every restart, in restart order.
    pub finals: Vec<InequalityCheck>,
    pub worst: InequalityCheck,
    pub worst_witness: VectorField,
}

fn ratio(c: &InequalityCheck) -> f64 {
    if c.rhs > 0.0 {
        c.lhs / c.rhs
    } else if c.pass {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Hill climbs `lhs / rhs` from Gaussian and perturbed single-character
/// starts (alternating). Each step adds a Gaussian vector to one site and
/// keeps it only if the ratio strictly improves.
#[allow(clippy::too_many_arguments)]
pub fn adversarial_search(
    domain: TorusDomain,
    norm: &Norm,
    k: usize,
    p: f64,
    target: AdversarialTarget,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> Result<AdversarialReport> {
    if restarts == 0 {
        return Err(Error::PreconditionViolation("at least one restart is required".into()));
    }
    // Validates every argument once before the parallel part.
    target.evaluate(&VectorField::zeros(domain, norm.dim), norm, k, p)?;
    let dim = norm.dim;
    let runs: Vec<Result<(InequalityCheck, f64, VectorField)>> = run_restarts(restarts, seed, |i, rng| {
        let mut f = if i % 2 == 0 {
            VectorField::gaussian(domain, dim, rng)
        } else {
            let freq: Vec<usize> = (0..domain.n).map(|_| rng.random_range(0..domain.m)).collect();
            let v: Vec<Complex64> =
                (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
            let noise = VectorField::gaussian(domain, dim, rng).scaled(Complex64::new(0.1, 0.0));
            VectorField::character(domain, &freq, &v).add(&noise)
        };
        let mut best = target.evaluate(&f, norm, k, p)?;
        let mut r = ratio(&best);
        let mut step = 0.5;
        for _ in 0..iterations {
            let x = rng.random_range(0..domain.size());
            let saved = f.at(x).to_vec();
            for c in f.at_mut(x) {
                *c += Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * step;
            }
            let c = target.evaluate(&f, norm, k, p)?;
            let rc = ratio(&c);
            if rc > r {
                r = rc;
                best = c;
                step = (step * 1.2_f64).min(4.0);
            } else {
                f.at_mut(x).copy_from_slice(&saved);
                step = (step * 0.9_f64).max(1e-3);
            }
        }
        Ok((best, r, f))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let worst_idx = runs
        .iter()
        .enumerate()
        .fold(0, |acc, (i, run)| if run.1 > runs[acc].1 { i } else { acc });
    let (worst, max_ratio, worst_witness) = runs[worst_idx].clone();
    Ok(AdversarialReport {
        target,
        restarts,
        iterations,
        seed,
        max_ratio,
        violations: runs.iter().filter(|r| !r.0.pass).count(),
        finals: runs.into_iter().map(|r| r.0).collect(),
        worst,
        worst_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::apply_symbol;
    use crate::numeric::derived_rng;

    #[test]
    fn index_set_examples() {
        let d2 = TorusDomain::new(2, 8).unwrap();
        let s = smoothing_set(0, 1, &d2).unwrap();
        assert_eq!(s.members, vec![vec![0, -1], vec![0, 1]]);
        let s1 = smoothing_set(0, 1, &TorusDomain::new(1, 4).unwrap()).unwrap();
        assert_eq!(s1.members, vec![vec![0]]);
        assert_eq!(smoothing_set(0, 3, &d2).unwrap().len(), 12);
        assert_eq!(smoothing_set(0, 2, &d2).unwrap_err(), Error::EvenK(2));
        assert_eq!(smoothing_set(0, 5, &d2).unwrap_err(), Error::KTooLarge { k: 5, half: 4 });
        assert_eq!(smoothing_set(0, 3, &TorusDomain::new(1, 6).unwrap()).unwrap_err(), Error::KTooLarge { k: 3, half: 3 });
    }

    #[test]
    fn default_radius() {
        assert_eq!(default_k(4).unwrap(), 1);
        assert_eq!(default_k(6).unwrap(), 1);
        assert_eq!(default_k(8).unwrap(), 3);
        assert_eq!(default_k(10).unwrap(), 3);
        assert_eq!(default_k(12).unwrap(), 5);
        assert!(default_k(2).is_err());
    }

    #[test]
    fn separable_matches_direct_and_spectral() {
        let d = TorusDomain::new(3, 8).unwrap();
        let f = VectorField::gaussian(d, 2, &mut derived_rng(4, 0));
        for (j, k) in [(0, 1), (1, 3), (2, 3)] {
            let fast = smoothing_apply(&f, j, k).unwrap();
            let set = smoothing_set(j, k, &d).unwrap();
            let mut direct = VectorField::zeros(d, 2);
            for y in &set.members {
                direct = direct.add(&f.translate(y));
            }
            let direct = direct.scaled(Complex64::new(set.normalization(), 0.0));
            assert!(fast.max_dist(&direct) < 1e-13);
            let spectral = apply_symbol(&f, |freq| Complex64::new(smoothing_symbol(freq, j, k, 8), 0.0));
            assert!(fast.max_dist(&spectral) < 1e-12);
        }
    }

    #[test]
    fn constants_and_trivial_radius() {
        let d = TorusDomain::new(1, 6).unwrap();
        let f = VectorField::gaussian(d, 1, &mut derived_rng(1, 0));
        assert_eq!(smoothing_apply(&f, 0, 1).unwrap(), f);
        let c = VectorField::constant(TorusDomain::new(2, 8).unwrap(), &[Complex64::new(2.0, -1.0)]);
        assert!(smoothing_apply(&c, 1, 3).unwrap().max_dist(&c) < 1e-15);
        let norm = Norm::l2(1);
        for check in lemma_checks(&c, &norm, 3, 2.0).unwrap() {
            assert!(check.pass && check.lhs < 1e-28 && check.rhs < 1e-28, "{check:?}");
        }
    }

    #[test]
    fn character_has_positive_slack() {
        let d = TorusDomain::new(2, 8).unwrap();
        let f = VectorField::character(d, &[1, 2], &[Complex64::new(1.0, 0.0)]);
        let c = check_lemma_approx(&f, &Norm::l2(1), 0, 1, 2.0).unwrap();
        assert!(c.pass && c.slack > 0.1);
    }

    #[test]
    fn one_dimensional_cancellation_is_the_sign_term() {
        let d = TorusDomain::new(1, 6).unwrap();
        let f = VectorField::gaussian(d, 2, &mut derived_rng(2, 0));
        let norm = Norm::new(1.5, 2).unwrap();
        let c = check_lemma_cancellation(&f, &norm, 1, 1.5, &[1]).unwrap();
        let direct = norm_mean(&f.translate(&[1]).sub(&f.translate(&[-1])), &norm, 1.5);
        assert!((c.lhs - direct).abs() < 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn metric_form_dominates_normed_form() {
        let d = TorusDomain::new(2, 8).unwrap();
        let f = VectorField::gaussian(d, 2, &mut derived_rng(5, 0));
        let norm = Norm::l2(2);
        for p in [1.0, 2.0] {
            let normed = check_lemma_approx(&f, &norm, 1, 3, p).unwrap();
            let metric = check_lemma_approx_metric(&NormedField::new(&f, norm).unwrap(), 1, 3, p).unwrap();
            assert!(normed.lhs <= metric.lhs + 1e-12);
            assert!((normed.rhs - metric.rhs).abs() < 1e-12);
            assert!(metric.pass);
        }
    }

    #[test]
    fn adversarial_search_is_deterministic() {
        let d = TorusDomain::new(2, 6).unwrap();
        let norm = Norm::l2(1);
        let run = || adversarial_search(d, &norm, 1, 2.0, AdversarialTarget::Approx { j: 0 }, 3, 40, 11).unwrap();
        let a = run();
        assert_eq!(a, run());
        assert_eq!(a.violations, 0);
        assert!(a.max_ratio >= ratio(&a.finals[0]));
    }
}
