use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    axis_sum, check_even, check_exponents, cotype_functionals, sigma_edge_mean, sign_edge_mean, CotypeOptions,
    CotypeReport, EvalMode,
};
use crate::check::{params, InequalityCheck};
use crate::error::{Error, Result};
use crate::field::{FieldDistance, GridFunction, MetricField, PointMap};
use crate::metric::{Metric, TorusDomain};
use crate::numeric::powp;
use crate::search::{best_climb, run_restarts, Climb, PowerTable, ShiftRatio};

/// Tolerance on `b_hat <= 1`.
pub const B_TOLERANCE: f64 = 1e-9;

/// Settings shared by the witness searches.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Total work in site visits; random restarts = `ceil(budget / m^n)`.
    pub budget: u64,
    pub seed: u64,
    /// Extra starting witnesses, climbed alongside the random restarts.
    pub initial: Vec<PointMap>,
    pub max_sweeps: usize,
}

impl SearchConfig {
    pub fn new(budget: u64, seed: u64) -> Self {
        Self { budget, seed, initial: Vec::new(), max_sweeps: 64 }
    }

    fn restarts(&self, sites: usize) -> usize {
        (self.budget.div_ceil(sites as u64) as usize).max(1)
    }
}

fn climb_all<M: Metric + Sync + ?Sized>(
    objective: &ShiftRatio,
    table: &PowerTable,
    domain: TorusDomain,
    space: &M,
    config: &SearchConfig,
) -> Vec<Climb> {
    let random = config.restarts(domain.size());
    let total = random + config.initial.len();
    run_restarts(total, config.seed, |i, rng: &mut ChaCha8Rng| {
        let start = if i < random {
            PointMap::random(domain, space.len(), rng).values
        } else {
            config.initial[i - random].values.clone()
        };
        objective.climb(start, table, config.max_sweeps, rng)
    })
}

fn cotype_objective(domain: &TorusDomain) -> ShiftRatio {
    let size = domain.size() as f64;
    let lhs: Vec<(Vec<i64>, f64)> =
        (0..domain.n).map(|j| (domain.axis(j, (domain.m / 2) as i64), 1.0 / size)).collect();
    let ternary = domain.ternary_vectors();
    let w = 1.0 / (ternary.len() as f64 * size);
    let rhs: Vec<(Vec<i64>, f64)> = ternary.into_iter().map(|e| (e, w)).collect();
    ShiftRatio::new(domain, &lhs, &rhs)
}

fn b_objective(domain: &TorusDomain, ell: usize) -> ShiftRatio {
    let size = domain.size() as f64;
    let lhs: Vec<(Vec<i64>, f64)> = (0..domain.n).map(|j| (domain.axis(j, ell as i64), 1.0 / size)).collect();
    let signs = domain.sign_vectors();
    let w = 1.0 / (signs.len() as f64 * size);
    let rhs: Vec<(Vec<i64>, f64)> = signs.into_iter().map(|e| (e, w)).collect();
    ShiftRatio::new(domain, &lhs, &rhs)
}

/// Stochastic lower bound on `Γ_q^{(p)}(space; n, m)`.
pub fn gamma_search<M: Metric + Sync + ?Sized>(
    space: &M,
    n: usize,
    m: usize,
    p: f64,
    q: f64,
    budget: u64,
    seed: u64,
) -> Result<CotypeReport> {
    gamma_search_with(space, n, m, p, q, &SearchConfig::new(budget, seed))
}

pub fn gamma_search_with<M: Metric + Sync + ?Sized>(
    space: &M,
    n: usize,
    m: usize,
    p: f64,
    q: f64,
    config: &SearchConfig,
) -> Result<CotypeReport> {
    check_exponents(p, q)?;
    check_even(m)?;
    let domain = TorusDomain::new(n, m)?;
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    let table = PowerTable::new(space, p)?;
    let objective = cotype_objective(&domain);
    let best = best_climb(climb_all(&objective, &table, domain, space, config));
    let witness = best.map(|c| c.witness).unwrap_or_else(|| vec![0; domain.size()]);
    let f = PointMap { domain, values: witness };
    let mut report = cotype_functionals(&MetricField::new(&f, space)?, p, q, CotypeOptions::default())?;
    report.mode = EvalMode::Sampled;
    report.seed = Some(config.seed);
    report.budget = Some(config.budget);
    Ok(report)
}

/// Both sides of the `B(M; n, ℓ)` inequality for one witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BReport {
    pub n: usize,
    pub ell: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs_raw: f64,
    pub b_hat: f64,
    pub degenerate: bool,
    pub mode: EvalMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub budget: Option<u64>,
    /// Number of witnesses evaluated to completion.
    pub evaluated: u64,
    /// Witnesses whose `b_hat` exceeded `1 + 1e-9`.
    pub violations: u64,
    pub witness: GridFunction,
}

pub(crate) fn b_from_sides(lhs: f64, rhs: f64, n: usize, ell: usize) -> Option<f64> {
    (rhs > 0.0).then(|| (lhs / ((ell * ell * n) as f64 * rhs)).sqrt())
}

fn b_eval<F: FieldDistance + ?Sized>(field: &F, ell: usize) -> Result<BReport> {
    let d = field.domain();
    check_even(d.m)?;
    let lhs = axis_sum(field, ell as i64, 2.0);
    let rhs = sign_edge_mean(field, 2.0);
    let b = b_from_sides(lhs, rhs, d.n, ell);
    let b_hat = b.unwrap_or(0.0);
    Ok(BReport {
        n: d.n,
        ell,
        m: d.m,
        lhs,
        rhs_raw: rhs,
        b_hat,
        degenerate: b.is_none(),
        mode: EvalMode::Exact,
        seed: None,
        budget: None,
        evaluated: 1,
        violations: u64::from(b_hat > 1.0 + B_TOLERANCE),
        witness: field.witness(),
    })
}

/// `b_hat = (Σ_j avg d(f(x+ℓe_j), f(x))² / (ℓ² n E_ε avg d(f(x+ε), f(x))²))^{1/2}`.
pub fn b_quantity<F: FieldDistance + ?Sized>(field: &F, ell: usize) -> Result<BReport> {
    if !ell.is_multiple_of(2) {
        return Err(Error::OddEll(ell));
    }
    b_eval(field, ell)
}

pub(crate) fn b_search_any_shift<M: Metric + Sync + ?Sized>(
    space: &M,
    n: usize,
    ell: usize,
    m: usize,
    config: &SearchConfig,
) -> Result<BReport> {
    check_even(m)?;
    let domain = TorusDomain::new(n, m)?;
    let table = PowerTable::new(space, 2.0)?;
    let objective = b_objective(&domain, ell);
    let climbs = climb_all(&objective, &table, domain, space, config);
    let scale = (ell * ell * n) as f64;
    let evaluated = climbs.len() as u64;
    let violations = climbs
        .iter()
        .filter_map(|c| c.ratio())
        .filter(|r| (r / scale).sqrt() > 1.0 + B_TOLERANCE)
        .count() as u64;
    let best = best_climb(climbs);
    let witness = best.map(|c| c.witness).unwrap_or_else(|| vec![0; domain.size()]);
    let f = PointMap { domain, values: witness };
    let mut report = b_eval(&MetricField::new(&f, space)?, ell)?;
    report.mode = EvalMode::Sampled;
    report.seed = Some(config.seed);
    report.budget = Some(config.budget);
    report.evaluated = evaluated;
    report.violations = violations;
    Ok(report)
}

/// Stochastic lower bound on `B(space; n, ℓ)` at a fixed even `m`.
pub fn b_quantity_search<M: Metric + Sync + ?Sized>(
    space: &M,
    n: usize,
    ell: usize,
    m: usize,
    budget: u64,
    seed: u64,
) -> Result<BReport> {
    if !ell.is_multiple_of(2) {
        return Err(Error::OddEll(ell));
    }
    b_search_any_shift(space, n, ell, m, &SearchConfig::new(budget, seed))
}

/// `Σ_j avg d(f(x+(am+r)e_j), f(x))² <= min{r², (m−r)²}·n·E_ε avg d(f(x+ε), f(x))²`
/// for even `r` with `0 <= r < m`.
pub fn mod_inequality_check<F: FieldDistance + ?Sized>(field: &F, a: usize, r: usize) -> Result<InequalityCheck> {
    let d = field.domain();
    check_even(d.m)?;
    if r >= d.m || !r.is_multiple_of(2) {
        return Err(Error::PreconditionViolation(format!("r = {r} must be even with 0 <= r < m = {}", d.m)));
    }
    let lhs = axis_sum(field, (a * d.m + r) as i64, 2.0);
    let edge = sign_edge_mean(field, 2.0);
    let factor = (r * r).min((d.m - r) * (d.m - r)) as f64;
    let rhs = factor * d.n as f64 * edge;
    Ok(InequalityCheck::new(
        "mod-inequality",
        params(&[("n", d.n.to_string()), ("m", d.m.to_string()), ("a", a.to_string()), ("r", r.to_string())]),
        lhs,
        rhs,
        lhs.max(edge * d.n as f64),
    ))
}

/// `Σ_j avg d(f(x+e_j), f(x))^p <= 3·2^{p−1}·n·(σ-average of d(f(x+ε), f(x))^p)`.
pub fn axis_edge_check<F: FieldDistance + ?Sized>(field: &F, p: f64) -> Result<InequalityCheck> {
    let d = field.domain();
    let lhs = axis_sum(field, 1, p);
    let rhs = 3.0 * powp(2.0, p - 1.0) * d.n as f64 * sigma_edge_mean(field, p);
    Ok(InequalityCheck::new(
        "axis-edges-vs-sigma-edges",
        params(&[("n", d.n.to_string()), ("m", d.m.to_string()), ("p", p.to_string())]),
        lhs,
        rhs,
        lhs,
    ))
}

/// Whether the composite side of the submultiplicativity check was
/// enumerated or sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubmultiplicativityMode {
    Exhaustive,
    Sampled,
}

/// `B_m(ℓk, st) <= B_m(ℓ, s)·B_m(k, t)` at a fixed even `m`, where `B_m`
/// is the supremum of `b_hat` over maps `Z_m^dim -> space`. The two factors
/// are always enumerated. The composite side is enumerated when it fits the
/// budget; otherwise every sampled witness is checked against the product.
pub fn tensor_submultiplicativity_check<M: Metric + Sync + ?Sized>(
    space: &M,
    ell: usize,
    k: usize,
    s: usize,
    t: usize,
    m: usize,
    budget: u64,
    seed: u64,
) -> Result<(InequalityCheck, SubmultiplicativityMode)> {
    let first = super::b_quantity_exhaustive(space, ell, s, m, budget)?;
    let second = super::b_quantity_exhaustive(space, k, t, m, budget)?;
    let rhs = first.b_hat * second.b_hat;
    let dim = ell * k;
    let sites = TorusDomain::new(dim, m)?.size();
    let maps = (space.len() as f64).powi(sites as i32);
    let (lhs, mode) = if maps <= budget as f64 {
        (super::b_quantity_exhaustive(space, dim, s * t, m, budget)?.b_hat, SubmultiplicativityMode::Exhaustive)
    } else {
        let r = b_search_any_shift(space, dim, s * t, m, &SearchConfig::new(budget, seed))?;
        (r.b_hat, SubmultiplicativityMode::Sampled)
    };
    let check = InequalityCheck::new(
        "tensor-submultiplicativity",
        params(&[
            ("l", ell.to_string()),
            ("k", k.to_string()),
            ("s", s.to_string()),
            ("t", t.to_string()),
            ("m", m.to_string()),
            ("mode", format!("{mode:?}").to_lowercase()),
        ]),
        lhs,
        rhs,
        1.0,
    );
    Ok((check, mode))
}
