use thiserror::Error;

/// Errors raised by the library. Metric-axiom failures carry the witness
/// indices that break the axiom.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance table is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance table is empty")]
    EmptySpace,
    #[error("non-finite distance at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("negative distance at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize },
    #[error("nonzero self-distance at ({i}, {i})")]
    NonzeroDiagonal { i: usize },
    #[error("zero distance between distinct points ({i}, {j})")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("asymmetric distance at ({i}, {j})")]
    Asymmetry { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{j}) > d({i},{via}) + d({via},{j})")]
    TriangleViolation { i: usize, j: usize, via: usize },
    #[error("label count {labels} does not match {size} points")]
    LabelMismatch { labels: usize, size: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} out of range for modulus {modulus}")]
    CoordinateOutOfRange { value: i64, modulus: usize },
    #[error("snowflake exponent {0} is outside (0, 1]")]
    AlphaOutOfRange(f64),
    #[error("points are in different components of the diagonal graph")]
    Unreachable,
    #[error("map is not injective: points {i} and {j} collide")]
    NotInjective { i: usize, j: usize },
    #[error("index {index} out of range for a space of {size} points")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("modulus m = {0} must be even")]
    OddM(usize),
    #[error("shift {0} must be even")]
    OddEll(usize),
    #[error("exponents must satisfy 1 <= p <= q, got p = {p}, q = {q}")]
    InvalidExponents { p: f64, q: f64 },
    #[error("smoothing radius k = {0} must be odd")]
    EvenK(usize),
    #[error("smoothing radius k = {k} must be < m/2 = {half}")]
    KTooLarge { k: usize, half: usize },
    #[error("work estimate {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("hypothesis fails: {0}")]
    HypothesisFailed(String),
    #[error("no even m <= {m_max} achieves the target constant")]
    NotFound { m_max: usize, profile: Vec<(usize, f64)> },
    #[error("codomain mismatch: {0}")]
    CodomainMismatch(String),
    #[error("invalid norm specification: {0}")]
    InvalidNorm(String),
    #[error("invalid metric file at {path}: {reason}")]
    InvalidMetricFile { path: String, reason: String },
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub(crate) fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}
