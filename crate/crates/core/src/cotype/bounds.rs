use serde::{Deserialize, Serialize};

use super::{check_exponents, gamma_exhaustive_two_point, gamma_hilbert_exact, gamma_search, EvalMode};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// What `Γ̂(n, m)` is measured on during an `m` scan.
#[derive(Debug, Clone, Copy)]
pub enum MTarget<'a> {
    /// Exact value for a Hilbert space; needs `p = q = 2`.
    Hilbert,
    /// Exact value for the two-point space by enumerating every map.
    TwoPointExhaustive,
    /// Hill-climbed lower bound over maps into `space`.
    Search { space: &'a FiniteMetricSpace, budget: u64, seed: u64 },
}

impl MTarget<'_> {
    fn mode(&self) -> EvalMode {
        match self {
            MTarget::Hilbert => EvalMode::Exact,
            MTarget::TwoPointExhaustive => EvalMode::Exhaustive,
            MTarget::Search { .. } => EvalMode::Sampled,
        }
    }

    fn measure(&self, n: usize, m: usize, p: f64, q: f64) -> Result<f64> {
        match *self {
            MTarget::Hilbert => Ok(gamma_hilbert_exact(n, m)?.value),
            MTarget::TwoPointExhaustive => Ok(gamma_exhaustive_two_point(n, m, p, q)?.gamma_hat),
            MTarget::Search { space, budget, seed } => Ok(gamma_search(space, n, m, p, q, budget, seed)?.gamma_hat),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanStep {
    Even,
    MultipleOf4,
}

impl ScanStep {
    fn step(self) -> usize {
        match self {
            ScanStep::Even => 2,
            ScanStep::MultipleOf4 => 4,
        }
    }
}

/// Result of an `m` scan. In `Sampled` mode the measured values are lower
/// bounds, so the returned `m` is only a lower bound on the true minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MExperiment {
    pub m: usize,
    pub mode: EvalMode,
    pub profile: Vec<(usize, f64)>,
}

/// Smallest scanned `m <= m_max` with `Γ̂(n, m) <= gamma`.
pub fn m_parameter_experiment(
    target: MTarget<'_>,
    n: usize,
    p: f64,
    q: f64,
    gamma: f64,
    m_max: usize,
    step: ScanStep,
) -> Result<MExperiment> {
    check_exponents(p, q)?;
    if matches!(target, MTarget::Hilbert) && (p != 2.0 || q != 2.0) {
        return Err(Error::PreconditionViolation("the exact Hilbert value needs p = q = 2".into()));
    }
    if n == 0 || !(gamma > 0.0) {
        return Err(Error::PreconditionViolation("n and the target constant must be positive".into()));
    }
    let mut profile = Vec::new();
    for m in (step.step()..=m_max).step_by(step.step()) {
        let g = target.measure(n, m, p, q)?;
        profile.push((m, g));
        if g <= gamma {
            return Ok(MExperiment { m, mode: target.mode(), profile });
        }
    }
    Err(Error::NotFound { m_max, profile })
}

fn check_positive(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(Error::PreconditionViolation("arguments must be positive and finite".into()))
    }
}

/// `2 ℓ0 · n^{log_{n0} ℓ0}`: the bound on the `m` needed at dimension `n`
/// given `B(M; n0, ℓ0) < 1`.
pub fn dimension_growth_bound(n: f64, n0: f64, ell0: f64) -> Result<f64> {
    check_positive(&[n, n0, ell0])?;
    if n0 <= 1.0 || ell0 <= 1.0 {
        return Err(Error::PreconditionViolation("n0 and ell0 must exceed 1".into()));
    }
    Ok(2.0 * ell0 * n.powf(ell0.ln() / n0.ln()))
}

/// `n^{1/q} / (2K)`: the distortion lower bound for `Z_m^n` in a space with
/// cotype constant `K`.
pub fn distortion_lower_bound(n: f64, q: f64, k: f64) -> Result<f64> {
    check_positive(&[n, q, k])?;
    Ok(n.powf(1.0 / q) / (2.0 * k))
}
