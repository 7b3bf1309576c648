use thiserror::Error;

/// Errors produced by the quadrature library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A pivot fell below the singularity tolerance during elimination.
    #[error("singular matrix: pivot {index} has magnitude {magnitude:e}")]
    SingularMatrix { index: usize, magnitude: f64 },

    /// The fast path cannot be used for this configuration, e.g. `nu` too
    /// small for the operator bandwidth.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("unsupported oscillator: {0}")]
    UnsupportedOscillator(String),

    #[error("pole in interval: {0}")]
    PoleInInterval(String),

    /// The fast solver hit a singular subsystem; the dense solver should be
    /// tried instead.
    #[error("fast path failed, fallback needed: {0}")]
    FallbackNeeded(String),

    #[error("collocation problem is not solvable: {0}")]
    Unsolvable(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
