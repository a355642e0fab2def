use thiserror::Error;

/// Errors raised by the spectral and bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProlateError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation not converged for n = {n} at dimension {dim}: relative change {change:e}")]
    TruncationNotConverged { n: usize, dim: usize, change: f64 },

    #[error("leading coefficient {coeff:e} is below the resolution floor {floor:e}; use the log-domain route")]
    ResolutionLoss { coeff: f64, floor: f64 },

    #[error("quadrature oracle unreliable: |psi(x*)| = {0:e}")]
    OracleUnreliable(f64),

    #[error("two-sided recurrence mismatch at index {index}: forward {forward:e}, backward {backward:e}")]
    MatchFailure { index: usize, forward: f64, backward: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("root bracket failure: {0}")]
    BracketFailure(String),
}

pub type Result<T> = std::result::Result<T, ProlateError>;

impl ProlateError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        ProlateError::Domain(msg.into())
    }
}
