use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("unknown command '{0}'")]
    UnknownCommand(String),
    /// `path` is a JSON path into the config, e.g. `$.m`.
    #[error("schema violation at {path}: {reason}")]
    SchemaViolation { path: String, reason: String },
    #[error("plot has no data points")]
    EmptySeries,
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error(transparent)]
    Core(#[from] metric_cotype::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn violation(path: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::SchemaViolation { path: path.into(), reason: reason.into() }
}

pub(crate) fn io_error(path: &str, e: std::io::Error) -> CliError {
    CliError::Io { path: path.to_string(), reason: e.to_string() }
}
