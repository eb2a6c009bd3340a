use rayon::prelude::*;

use super::witness_search::{b_from_sides, BReport, B_TOLERANCE};
use super::{check_even, check_exponents, cotype_functionals, CotypeOptions, CotypeReport, EvalMode};
use crate::error::{check_budget, Result};
use crate::field::{GridFunction, MetricField, PointMap};
use crate::metric::{FiniteMetricSpace, Metric, TorusDomain};
use crate::search::{PowerTable, ShiftRatio};

/// Largest `m^n` for which all `2^{m^n}` two-valued maps are enumerated.
pub const MAX_EXHAUSTIVE_SITES: usize = 20;

fn permute(mask: u32, table: &[usize]) -> u32 {
    table.iter().enumerate().fold(0u32, |acc, (x, &y)| acc | ((mask >> y) & 1) << x)
}

/// Exact `Γ_q^{(p)}` of the two-point space on `Z_m^n`, by enumerating every
/// map `Z_m^n -> {u, v}`. For two points `d^p = d`, so both sides are edge
/// counts and candidates are compared as exact rationals; ties go to the
/// smallest bitmask (bit `x` set iff `f(x) = v`).
pub fn gamma_exhaustive_two_point(n: usize, m: usize, p: f64, q: f64) -> Result<CotypeReport> {
    check_exponents(p, q)?;
    check_even(m)?;
    let d = TorusDomain::new(n, m)?;
    let sites = d.size();
    check_budget(1u128 << sites.min(127), 1u128 << MAX_EXHAUSTIVE_SITES)?;
    let lhs_tables: Vec<Vec<usize>> = (0..n).map(|j| d.shift_table(&d.axis(j, (m / 2) as i64))).collect();
    let rhs_tables: Vec<Vec<usize>> = d
        .ternary_vectors()
        .into_iter()
        .filter(|e| e.iter().any(|&c| c != 0))
        .map(|e| d.shift_table(&e))
        .collect();
    let count = |mask: u32, tables: &[Vec<usize>]| -> u64 {
        tables.iter().map(|t| (mask ^ permute(mask, t)).count_ones() as u64).sum()
    };
    // (lhs edges, rhs edges, mask); better = larger lhs/rhs, then smaller mask.
    let better = |a: (u64, u64, u32), b: (u64, u64, u32)| -> bool {
        let (la, ra) = (a.0 as u128 * b.1 as u128, b.0 as u128 * a.1 as u128);
        la > ra || (la == ra && a.2 < b.2)
    };
    let best = (0..1u32 << sites)
        .into_par_iter()
        .filter_map(|mask| {
            let r = count(mask, &rhs_tables);
            (r > 0).then(|| (count(mask, &lhs_tables), r, mask))
        })
        .reduce_with(|a, b| if better(a, b) { a } else { b });
    let mask = best.map(|b| b.2).unwrap_or(0);
    let f = PointMap { domain: d, values: (0..sites).map(|x| (mask >> x & 1) as usize).collect() };
    let two = FiniteMetricSpace::two_point(1.0);
    let mut report = cotype_functionals(&MetricField::new(&f, &two)?, p, q, CotypeOptions::default())?;
    report.mode = EvalMode::Exhaustive;
    Ok(report)
}

/// Exact `sup_f b_hat(f)` over all maps `Z_m^n -> space` at shift `ell`
/// (any integer shift; `ell ≡ 0 mod m` gives 0). Needs
/// `|space|^{m^n} <= budget`. Ties go to the lexicographically smallest map.
pub fn b_quantity_exhaustive<M: Metric + Sync + ?Sized>(
    space: &M,
    n: usize,
    ell: usize,
    m: usize,
    budget: u64,
) -> Result<BReport> {
    check_even(m)?;
    let d = TorusDomain::new(n, m)?;
    let sites = d.size();
    let base = space.len() as u128;
    let total = base.checked_pow(sites as u32).unwrap_or(u128::MAX);
    check_budget(total, budget as u128)?;
    let table = PowerTable::new(space, 2.0)?;
    let size = sites as f64;
    let lhs: Vec<(Vec<i64>, f64)> = (0..n).map(|j| (d.axis(j, ell as i64), 1.0 / size)).collect();
    let signs = d.sign_vectors();
    let w = 1.0 / (signs.len() as f64 * size);
    let rhs: Vec<(Vec<i64>, f64)> = signs.into_iter().map(|e| (e, w)).collect();
    let objective = ShiftRatio::new(&d, &lhs, &rhs);
    let decode = |mut idx: u128| -> Vec<usize> {
        let mut f = vec![0usize; sites];
        for slot in f.iter_mut().rev() {
            *slot = (idx % base) as usize;
            idx /= base;
        }
        f
    };
    let results: Vec<(f64, u128, f64)> = (0..total as u64)
        .into_par_iter()
        .filter_map(|idx| {
            let (l, r) = objective.totals(&decode(idx as u128), &table);
            b_from_sides(l, r, n, ell).map(|b| (b, idx as u128, b))
        })
        .collect();
    let violations = results.iter().filter(|r| r.2 > 1.0 + B_TOLERANCE).count() as u64;
    let best = results.iter().fold(None::<(f64, u128)>, |acc, &(b, idx, _)| match acc {
        Some((bb, _)) if bb >= b => acc,
        _ => Some((b, idx)),
    });
    let witness = decode(best.map(|b| b.1).unwrap_or(0));
    let f = PointMap { domain: d, values: witness };
    let field = MetricField::new(&f, space)?;
    let lhs_v = super::axis_sum(&field, ell as i64, 2.0);
    let rhs_v = super::sign_edge_mean(&field, 2.0);
    let b = b_from_sides(lhs_v, rhs_v, n, ell);
    Ok(BReport {
        n,
        ell,
        m,
        lhs: lhs_v,
        rhs_raw: rhs_v,
        b_hat: b.unwrap_or(0.0),
        degenerate: b.is_none(),
        mode: EvalMode::Exhaustive,
        seed: None,
        budget: Some(budget),
        evaluated: total as u64,
        violations,
        witness: GridFunction::MetricPoint(f),
    })
}
