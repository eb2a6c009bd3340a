//! Randomized and exact property suites behind `verify`.

use std::f64::consts::PI;

use metric_cotype::check::{params, InequalityCheck};
use metric_cotype::cotype::{
    b_quantity, gamma_exhaustive_two_point, gamma_hilbert_exact, axis_edge_check, mod_inequality_check,
};
use metric_cotype::embeddings::{
    extract_grid, frechet_cycle, grid_lower_bound_check, grid_to_torus, l1_snowflake_check, sparse_frechet_cycle,
};
use metric_cotype::field::{MetricField, PointMap, VectorField};
use metric_cotype::harmonic::{fourier_forward, fourier_inverse, rad_identity_residual};
use metric_cotype::metric::TorusDomain;
use metric_cotype::numeric::{derived_rng, Norm};
use metric_cotype::smoothing::lemma_checks;

use crate::error::CliResult;
use crate::report::LedgerRow;

const HARMONIC_CELLS: [(usize, usize); 5] = [(1, 4), (1, 6), (2, 4), (2, 6), (3, 4)];
const SMOOTHING_CELLS: [(usize, usize, usize, f64); 4] = [(1, 6, 1, 1.0), (1, 8, 3, 2.0), (2, 6, 1, 2.0), (2, 8, 3, 1.0)];
/// `(n, m, ell)`.
const COTYPE_CELLS: [(usize, usize, usize); 4] = [(1, 4, 2), (2, 4, 2), (2, 6, 2), (3, 4, 2)];

fn stream(suite: u64, cell: usize, trial: usize) -> u64 {
    (suite << 48) | ((cell as u64) << 32) | trial as u64
}

fn with_trial(mut c: InequalityCheck, trial: usize) -> InequalityCheck {
    c.params = format!("{};trial={trial}", c.params);
    c
}

pub fn harmonic(trials: usize, norm: &Norm, seed: u64) -> CliResult<Vec<InequalityCheck>> {
    let mut out = Vec::new();
    for (c, &(n, m)) in HARMONIC_CELLS.iter().enumerate() {
        let d = TorusDomain::new(n, m)?;
        for t in 0..trials {
            let f = VectorField::gaussian(d, norm.dim, &mut derived_rng(seed, stream(1, c, t)));
            let scale = f.scale();
            let text = params(&[
                ("n", n.to_string()),
                ("m", m.to_string()),
                ("dim", norm.dim.to_string()),
                ("trial", t.to_string()),
            ]);
            let residual = rad_identity_residual(&f)?;
            out.push(InequalityCheck::new("rad-identity", text.clone(), residual, 1e-10 * scale, 0.0));
            let coeffs = fourier_forward(&f);
            let back = fourier_inverse(&coeffs);
            out.push(InequalityCheck::new("fourier-roundtrip", text.clone(), f.max_dist(&back), 1e-10 * scale, 0.0));
            let mean_square = (0..d.size()).map(|x| f.at(x).iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>()
                / d.size() as f64;
            out.push(InequalityCheck::new(
                "parseval",
                text,
                (coeffs.energy() - mean_square).abs(),
                1e-10 * mean_square,
                0.0,
            ));
        }
    }
    Ok(out)
}

pub fn smoothing(trials: usize, norm: &Norm, seed: u64) -> CliResult<Vec<InequalityCheck>> {
    let mut out = Vec::new();
    for (c, &(n, m, k, p)) in SMOOTHING_CELLS.iter().enumerate() {
        let d = TorusDomain::new(n, m)?;
        for t in 0..trials {
            let f = VectorField::gaussian(d, norm.dim, &mut derived_rng(seed, stream(2, c, t)));
            out.extend(lemma_checks(&f, norm, k, p)?.into_iter().map(|ch| with_trial(ch, t)));
        }
    }
    Ok(out)
}

pub fn cotype(trials: usize, seed: u64) -> CliResult<Vec<InequalityCheck>> {
    let mut out = Vec::new();
    for (c, &(n, m, ell)) in COTYPE_CELLS.iter().enumerate() {
        let d = TorusDomain::new(n, m)?;
        for t in 0..trials {
            let f = PointMap::random(d, d.size(), &mut derived_rng(seed, stream(3, c, t)));
            let field = MetricField::new(&f, &d)?;
            let b = b_quantity(&field, ell)?;
            let text = params(&[("n", n.to_string()), ("m", m.to_string()), ("l", ell.to_string()), ("trial", t.to_string())]);
            out.push(InequalityCheck::new("b-at-most-one", text, b.b_hat, 1.0, 1.0));
            out.push(with_trial(mod_inequality_check(&field, 1, 2)?, t));
            out.push(with_trial(axis_edge_check(&field, 1.0)?, t));
        }
    }
    let bound = 6f64.sqrt() / PI;
    for n in 1..=6usize {
        for m in (4..=32).step_by(4) {
            if (m as f64) < 2.0 / 3.0 * PI * (n as f64).sqrt() {
                continue;
            }
            let g = gamma_hilbert_exact(n, m)?;
            let text = params(&[("n", n.to_string()), ("m", m.to_string())]);
            out.push(InequalityCheck::new("hilbert-upper-bound", text, g.value, bound, 1.0));
        }
    }
    let four = gamma_exhaustive_two_point(1, 4, 2.0, 2.0)?.gamma_hat;
    let two = gamma_exhaustive_two_point(1, 2, 2.0, 2.0)?.gamma_hat;
    out.push(InequalityCheck::new("two-point-monotone", "n=1;m=4 vs m=2;p=2;q=2", four, two, 1.0));
    Ok(out)
}

pub fn embeddings(trials: usize, seed: u64) -> CliResult<Vec<InequalityCheck>> {
    let mut out = Vec::new();
    for m in 1..=8usize {
        let r = frechet_cycle(m)?;
        out.push(InequalityCheck::new("frechet-distortion", format!("m={m}"), r.distortion, 1.0, 1.0));
    }
    for eps in [0.5, 0.25, 0.125] {
        let r = sparse_frechet_cycle(32, eps)?;
        out.push(InequalityCheck::new("sparse-frechet-distortion", format!("m=32;eps={eps}"), r.distortion, 1.0 + 6.0 * eps, 1.0));
    }
    let r = grid_to_torus(4, 2)?;
    out.push(InequalityCheck::new("grid-torus-distortion", "m=4;n=2", r.distortion, 1.0, 1.0));
    out.push(grid_lower_bound_check(2, 4, 3, trials, trials / 5, seed)?.check);
    let flake = l1_snowflake_check(2, 4, 3, trials, seed)?;
    out.push(flake.cotype);
    out.push(flake.distortion);
    for (n, m) in [(1, 8), (2, 8)] {
        let d = TorusDomain::new(n, m)?;
        let id = PointMap::identity(d);
        let r = extract_grid(&MetricField::new(&id, &d)?, m / 2)?;
        let text = params(&[("n", n.to_string()), ("m", m.to_string()), ("s", (m / 2).to_string())]);
        out.push(InequalityCheck::new("extract-grid-isometric", text, r.record.distortion, 1.0, 1.0));
    }
    Ok(out)
}

/// Runs the named suite (`all` runs every suite) and tags each check.
pub fn run_suite(suite: &str, trials: usize, norm: &Norm, seed: u64) -> CliResult<Vec<LedgerRow>> {
    let names: Vec<&str> = match suite {
        "all" => vec!["harmonic", "smoothing", "cotype", "embeddings"],
        other => vec![other],
    };
    let mut rows = Vec::new();
    for name in names {
        let checks = match name {
            "harmonic" => harmonic(trials, norm, seed)?,
            "smoothing" => smoothing(trials, norm, seed)?,
            "cotype" => cotype(trials, seed)?,
            "embeddings" => embeddings(trials, seed)?,
            _ => unreachable!("suite names are validated"),
        };
        rows.extend(checks.into_iter().map(|check| LedgerRow { suite: name.to_string(), check }));
    }
    Ok(rows)
}
