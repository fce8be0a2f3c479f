use thiserror::Error;

/// Errors raised by the algebra, metric, realization and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates a stated constraint; the message names it.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The family parameter z lies outside the admissible set.
    #[error("z = {z} is outside the admissible domain: {reason}")]
    ZOutOfDomain { z: f64, reason: String },

    /// θ² = ε² − 4|η|² is negative, so θ is not real.
    #[error("theta^2 = {theta_sq} < 0: oscillatory regime is not supported here")]
    TrigRegime { theta_sq: f64 },

    /// The pivot entry of a Gauss decomposition vanishes.
    #[error("decomposition pivot vanishes (|pivot| = {pivot:e})")]
    DecompositionSingular { pivot: f64 },

    #[error("matrix is not symmetric (relative asymmetry {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    /// The trusted block must be strictly smaller than the basis.
    #[error("trusted block {trusted} is too large for basis dimension {dim}")]
    TruncationTooSmall { dim: usize, trusted: usize },
}

impl Error {
    /// True for errors caused by bad input (as opposed to numerical failure).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_) | Error::ZOutOfDomain { .. } | Error::TrigRegime { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
