use std::f64::consts::PI;

use serde::Serialize;
use serde_json::{json, Value};

use metric_cotype::check::{params, InequalityCheck};
use metric_cotype::cotype::{
    b_quantity_search, gamma_exhaustive_two_point, gamma_hilbert_exact, gamma_search, dimension_growth_bound,
    distortion_lower_bound, mod_inequality_check,
};
use metric_cotype::embeddings::{
    coarse_obstruction_check, extract_grid, frechet_cycle, grid_lower_bound_bound, grid_to_torus,
    sparse_frechet_cycle,
};
use metric_cotype::field::{FieldDistance, MetricField, PointMap};
use metric_cotype::harmonic::root_of_unity;
use metric_cotype::metric::{FiniteMetricSpace, Metric, PointCloud, Snowflaked, TorusDomain};
use metric_cotype::numeric::{derived_rng, Norm};

use crate::config::{ExperimentConfig, Params};
use crate::error::{io_error, violation, CliResult};
use crate::plot::{emit_plot, Plot, Reference, Series};
use crate::report::{LedgerRow, Mode, Report};
use crate::verify::run_suite;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn rows(suite: &str, checks: Vec<InequalityCheck>) -> Vec<LedgerRow> {
    checks.into_iter().map(|check| LedgerRow { suite: suite.to_string(), check }).collect()
}

pub fn load_space(path: &str) -> CliResult<FiniteMetricSpace> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(FiniteMetricSpace::from_json_str(&text)?)
}

/// A user-supplied metric file, or the torus `Z_m^n` itself.
fn target_space(p: &Params, domain: TorusDomain) -> CliResult<Box<dyn Metric + Sync>> {
    Ok(match p.opt_str("space") {
        Some(path) => Box::new(load_space(path)?),
        None => Box::new(domain),
    })
}

/// Validates `config`, dispatches to the named command and returns the
/// report. Writes nothing.
pub fn execute(config: &ExperimentConfig) -> CliResult<Report> {
    let config = config.validated()?;
    let p = Params(&config.params);
    let cmd = config.command.as_str();
    let (seed, budget) = (config.seed, config.budget);
    let (mode, results, checks, plot) = match cmd {
        "gamma-hilbert" => {
            let (n, m) = (p.usize("n"), p.usize("m"));
            let g = gamma_hilbert_exact(n, m)?;
            let mut checks = Vec::new();
            if m as f64 >= 2.0 / 3.0 * PI * (n as f64).sqrt() {
                let text = params(&[("n", n.to_string()), ("m", m.to_string())]);
                checks.push(InequalityCheck::new("hilbert-upper-bound", text, g.value, 6f64.sqrt() / PI, 1.0));
            }
            (Mode::Exact, to_value(&g), checks, None)
        }
        "gamma-search" => {
            let space = load_space(p.str("space"))?;
            let r = gamma_search(&space, p.usize("n"), p.usize("m"), p.f64("p"), p.f64("q"), budget, seed)?;
            (Mode::Sampled, to_value(&r), Vec::new(), None)
        }
        "gamma-exhaustive" => {
            let r = gamma_exhaustive_two_point(p.usize("n"), p.usize("m"), p.f64("p"), p.f64("q"))?;
            (Mode::Exhaustive, to_value(&r), Vec::new(), None)
        }
        "bq" => {
            let (n, m, ell) = (p.usize("n"), p.usize("m"), p.usize("ell"));
            let space = target_space(&p, TorusDomain::new(n, m)?)?;
            let r = b_quantity_search(space.as_ref(), n, ell, m, budget, seed)?;
            let text = params(&[("n", n.to_string()), ("m", m.to_string()), ("l", ell.to_string())]);
            let check = InequalityCheck::new("b-at-most-one", text, r.b_hat, 1.0, 1.0);
            (Mode::Sampled, to_value(&r), vec![check], None)
        }
        "mod-check" => {
            let d = TorusDomain::new(p.usize("n"), p.usize("m"))?;
            let (a, r) = (p.usize("a"), p.usize("r"));
            let space = target_space(&p, d)?;
            let mut checks = Vec::new();
            if !p.has("space") {
                let id = PointMap::identity(d);
                let mut c = mod_inequality_check(&MetricField::new(&id, space.as_ref())?, a, r)?;
                c.params.push_str(";witness=identity");
                checks.push(c);
            }
            for t in 0..p.usize("trials") {
                let f = PointMap::random(d, space.len(), &mut derived_rng(seed, t as u64));
                let mut c = mod_inequality_check(&MetricField::new(&f, space.as_ref())?, a, r)?;
                c.params.push_str(&format!(";trial={t}"));
                checks.push(c);
            }
            let worst = checks.iter().map(|c| c.lhs - c.rhs).fold(f64::NEG_INFINITY, f64::max);
            (Mode::Sampled, json!({ "checks": checks.len(), "max_lhs_minus_rhs": worst }), checks, None)
        }
        "verify" => {
            let norm: Norm = p.str("norm").parse().map_err(|e: metric_cotype::Error| violation("$.norm", e.to_string()))?;
            let rows = run_suite(p.str("suite"), p.usize("trials"), &norm, seed)?;
            let total = rows.len();
            return Ok(Report::new(config.clone(), Mode::Mixed, json!({ "checks": total }), rows));
        }
        "embed" => {
            let (m, n, eps) = (p.usize("m"), p.usize("n"), p.f64("eps"));
            let (record, name, text, bound) = match p.str("kind") {
                "frechet" => (frechet_cycle(m)?, "frechet-distortion", format!("m={m}"), 1.0),
                "sparse" => (sparse_frechet_cycle(m, eps)?, "sparse-frechet-distortion", format!("m={m};eps={eps}"), 1.0 + 6.0 * eps),
                _ => (grid_to_torus(m, n)?, "grid-torus-distortion", format!("m={m};n={n}"), 1.0),
            };
            let check = InequalityCheck::new(name, text, record.distortion, bound, 1.0);
            (Mode::Exact, to_value(&record), vec![check], None)
        }
        "extract-grid" => {
            let (n, m) = (p.usize("n"), p.usize("m"));
            let s = p.opt_usize("s").unwrap_or(m / 2);
            let alpha = p.f64("alpha");
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(violation("$.alpha", "snowflake exponent must lie in (0, 1]"));
            }
            let d = TorusDomain::new(n, m)?;
            let id = PointMap::identity(d);
            let flake = Snowflaked { inner: &d, alpha };
            let field: &dyn FieldDistance = &MetricField::new(&id, &flake)?;
            let r = extract_grid(field, s)?;
            let mut checks = Vec::new();
            if r.eta == 0.0 {
                let text = params(&[("n", n.to_string()), ("m", m.to_string()), ("s", s.to_string())]);
                checks.push(InequalityCheck::new("extract-grid-isometric", text, r.record.distortion, 1.0, 1.0));
            }
            (Mode::Exact, to_value(&r), checks, None)
        }
        "moduli-check" => {
            let d = TorusDomain::new(p.usize("n"), p.usize("m"))?;
            let (pp, q, r, s) = (p.f64("p"), p.f64("q"), p.f64("r"), p.f64("s"));
            let space: FiniteMetricSpace = match p.opt_str("space") {
                Some(path) => load_space(path)?,
                None => PointCloud {
                    points: (0..d.size())
                        .map(|x| d.coords(x).iter().map(|&c| root_of_unity(c as i64, d.m) * s).collect())
                        .collect(),
                    norm: Norm::new(r, d.n)?,
                }
                .materialize()?,
            };
            let mut checks = Vec::new();
            if !p.has("space") {
                let mut c = coarse_obstruction_check(&PointMap::identity(d), &space, pp, q, r, s)?;
                c.params.push_str(";witness=identity");
                checks.push(c);
            }
            for t in 0..p.usize("trials") {
                let f = PointMap::random(d, space.len(), &mut derived_rng(seed, t as u64));
                let mut c = coarse_obstruction_check(&f, &space, pp, q, r, s)?;
                c.params.push_str(&format!(";trial={t}"));
                checks.push(c);
            }
            (Mode::Sampled, json!({ "checks": checks.len() }), checks, None)
        }
        "bounds" => {
            let n = p.f64("n");
            let need = |key: &str| p.opt_f64(key).ok_or_else(|| violation(format!("$.{key}"), "required for this bound"));
            let bound = match p.str("which") {
                "lemma-6-3" => dimension_growth_bound(n, need("n0")?, need("ell0")?)?,
                _ => distortion_lower_bound(n, need("q")?, need("k")?)?,
            };
            (Mode::Exact, json!({ "bound": bound }), Vec::new(), None)
        }
        "plot" => {
            if config.plot.is_none() {
                return Err(violation("$.plot", "the plot command needs an output path"));
            }
            let plot = build_plot(&p)?;
            (Mode::Exact, to_value(&plot), Vec::new(), Some(plot))
        }
        _ => unreachable!("validated() rejects unknown commands"),
    };
    let mut report = Report::new(config.clone(), mode, results, rows(cmd, checks));
    report.plot = plot;
    Ok(report)
}

fn build_plot(p: &Params) -> CliResult<Plot> {
    Ok(match p.str("kind") {
        "gamma-vs-m" => {
            let n = p.opt_usize("n").unwrap_or(4);
            let points = (4..=p.usize("m_max"))
                .step_by(4)
                .map(|m| Ok((m as f64, gamma_hilbert_exact(n, m)?.value)))
                .collect::<CliResult<Vec<_>>>()?;
            Plot {
                title: format!("Hilbert-space cotype constant, n = {n}"),
                x_label: "m".into(),
                y_label: "Γ_2(H; n, m)".into(),
                series: vec![Series { label: "exact value".into(), points }],
                references: vec![Reference { label: "√6/π".into(), y: 6f64.sqrt() / PI }],
            }
        }
        _ => {
            let m = p.opt_usize("m").unwrap_or(8);
            let ns: Vec<usize> = (1..=p.usize("n_max")).collect();
            let grid = ns
                .iter()
                .map(|&n| Ok((n as f64, grid_lower_bound_bound(n, m)?)))
                .collect::<CliResult<Vec<_>>>()?;
            let k = 6f64.sqrt() / PI;
            let generic =
                ns.iter().map(|&n| Ok((n as f64, distortion_lower_bound(n as f64, 2.0, k)?))).collect::<CliResult<Vec<_>>>()?;
            Plot {
                title: format!("Distortion lower bounds for Z_{m}^n into Hilbert space"),
                x_label: "n".into(),
                y_label: "distortion lower bound".into(),
                series: vec![
                    Series { label: format!("√n / (2 Γ_2(H; n, {m}))"), points: grid },
                    Series { label: "√n / (2K), K = √6/π".into(), points: generic },
                ],
                references: Vec::new(),
            }
        }
    })
}

/// [`execute`], then writes the JSON report, the CSV ledger and the plot
/// to the paths named in the config.
pub fn run(config: &ExperimentConfig) -> CliResult<Report> {
    let report = execute(config)?;
    if let Some(path) = &config.out {
        std::fs::write(path, report.to_json()).map_err(|e| io_error(path, e))?;
    }
    if let Some(path) = &config.csv {
        std::fs::write(path, report.to_csv()).map_err(|e| io_error(path, e))?;
    }
    if let (Some(path), Some(plot)) = (&config.plot, &report.plot) {
        emit_plot(plot, path)?;
    }
    Ok(report)
}
