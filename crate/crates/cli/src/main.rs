use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use cotype_lab::config::parse_scalar;
use cotype_lab::{run, CliError, ExperimentConfig};

/// Runs one experiment and prints its JSON report (or writes it to --out).
/// Exits 0 when every check passes, 1 when some fail and 2 on errors.
#[derive(Parser, Debug)]
#[command(name = "cotype-lab", version, about)]
struct Args {
    /// gamma-hilbert, gamma-search, gamma-exhaustive, bq, mod-check, verify,
    /// embed, extract-grid, moduli-check, bounds, plot, or `run` with --config.
    command: String,
    /// Suite for verify, kind for embed and plot, which bound for bounds.
    target: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    ell: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// Metric-space JSON file.
    #[arg(long)]
    space: Option<String>,
    /// Norm spec `lp:<p>:<d>`.
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// CSV ledger path.
    #[arg(long)]
    csv: Option<String>,
    /// SVG path for the plot command.
    #[arg(long)]
    plot: Option<String>,
    /// Config file for `run`.
    #[arg(long)]
    config: Option<String>,
    /// Any other parameter, e.g. `--set alpha=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the wall-clock runtime to stderr.
    #[arg(long)]
    timing: bool,
}

fn target_key(command: &str) -> &'static str {
    match command {
        "verify" => "suite",
        "bounds" => "which",
        _ => "kind",
    }
}

fn build(args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut config = if args.command == "run" {
        let path = args.config.as_deref().ok_or_else(|| CliError::SchemaViolation {
            path: "--config".into(),
            reason: "run needs a config file".into(),
        })?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io { path: path.to_string(), reason: e.to_string() })?;
        ExperimentConfig::from_json_str(&text)?
    } else {
        ExperimentConfig::new(args.command.clone())
    };
    if let Some(t) = &args.target {
        config.params.insert(target_key(&config.command).into(), t.clone().into());
    }
    let flags = [
        ("n", &args.n),
        ("m", &args.m),
        ("p", &args.p),
        ("q", &args.q),
        ("ell", &args.ell),
        ("s", &args.s),
        ("k", &args.k),
        ("eps", &args.eps),
        ("space", &args.space),
        ("norm", &args.norm),
        ("trials", &args.trials),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.params.insert(key.into(), parse_scalar(v));
        }
    }
    for pair in &args.set {
        let (key, value) = pair.split_once('=').ok_or_else(|| CliError::SchemaViolation {
            path: "--set".into(),
            reason: format!("expected KEY=VALUE, got '{pair}'"),
        })?;
        config.params.insert(key.into(), parse_scalar(value));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(budget) = args.budget {
        config.budget = budget;
    }
    for (slot, value) in [(&mut config.out, &args.out), (&mut config.csv, &args.csv), (&mut config.plot, &args.plot)] {
        if value.is_some() {
            slot.clone_from(value);
        }
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    let outcome = build(&args).and_then(|config| run(&config).map(|r| (config, r)));
    if args.timing {
        eprintln!("runtime: {:.3} s", start.elapsed().as_secs_f64());
    }
    match outcome {
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Ok((config, report)) => {
            if config.out.is_none() {
                print!("{}", report.to_json());
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} of {} checks failed", report.failures, report.checks.len());
                ExitCode::from(1)
            }
        }
    }
}
