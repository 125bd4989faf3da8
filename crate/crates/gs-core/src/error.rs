//! Error type shared by all gs-core modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GsError {
    /// A precondition on a mathematical domain was violated (bad index
    /// range, matrix outside the required cone, dimension mismatch).
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid point failed an admissibility requirement.
    #[error("inadmissible point at (level {level}, spatial {spatial}): {what}")]
    InadmissiblePoint {
        level: usize,
        spatial: usize,
        what: String,
    },

    /// Nonlinear iteration failed to converge.
    #[error("solver did not converge: {0}")]
    NonConverged(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl GsError {
    pub fn domain(msg: impl Into<String>) -> Self {
        GsError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, GsError>;
