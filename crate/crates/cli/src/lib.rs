//! Experiment runner for `metric-cotype`: validated configs, deterministic
//! JSON reports, CSV check ledgers and SVG plots.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;
pub mod verify;

pub use commands::{execute, run};
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use plot::{emit_plot, render_svg, Plot, Series};
pub use report::{Mode, Report};
