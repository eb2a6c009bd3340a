use serde::{Deserialize, Serialize};

/// Relative slack on the dominating side of every inequality assertion.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;
/// Absolute floor, as a multiple of the caller's natural scale.
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl InequalityCheck {
    /// `scale` sets the absolute floor of the tolerance; pass the size of a
    /// typical term (for instance `max ‖f‖^p`) so that exact cancellation in
    /// floating point is not reported as a violation.
    pub fn new(name: impl Into<String>, params: impl Into<String>, lhs: f64, rhs: f64, scale: f64) -> Self {
        let tolerance = RELATIVE_TOLERANCE * rhs.abs() + ABSOLUTE_FLOOR * scale.abs();
        let pass = lhs.is_finite() && (rhs == f64::INFINITY || (rhs.is_finite() && lhs <= rhs + tolerance));
        Self { name: name.into(), params: params.into(), lhs, rhs, slack: rhs - lhs, tolerance, pass }
    }

    /// `name,params,lhs,rhs,slack,pass` with the params field quoted.
    pub fn csv_row(&self, suite: &str) -> String {
        format!(
            "{},{},\"{}\",{:e},{:e},{:e},{}",
            suite,
            self.name,
            self.params.replace('"', "'"),
            self.lhs,
            self.rhs,
            self.slack,
            self.pass
        )
    }
}

/// `key=value` pairs joined with `;`, in the given order.
pub fn params(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}
