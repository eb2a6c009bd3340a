use serde::{Deserialize, Serialize};
use serde_json::Value;

use metric_cotype::check::InequalityCheck;

use crate::config::ExperimentConfig;
use crate::plot::Plot;

/// Bumped whenever a field of [`Report`] changes meaning.
pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "suite,name,params,lhs,rhs,slack,pass";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Exhaustive,
    Sampled,
    /// A suite with both exact and sampled checks.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub suite: String,
    #[serde(flatten)]
    pub check: InequalityCheck,
}

/// The outcome of one run. Contains no timing or host data, so the same
/// config always serializes to the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub mode: Mode,
    pub results: Value,
    /// Sorted by name, then params, then suite.
    pub checks: Vec<LedgerRow>,
    pub failures: usize,
    #[serde(skip)]
    pub plot: Option<Plot>,
}

impl Report {
    pub fn new(config: ExperimentConfig, mode: Mode, results: Value, mut checks: Vec<LedgerRow>) -> Self {
        checks.sort_by(|a, b| {
            (&a.check.name, &a.check.params, &a.suite).cmp(&(&b.check.name, &b.check.params, &b.suite))
        });
        let failures = checks.iter().filter(|r| !r.check.pass).count();
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            mode,
            results,
            checks,
            failures,
            plot: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for row in &self.checks {
            s.push_str(&row.check.csv_row(&row.suite));
            s.push('\n');
        }
        s
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}
