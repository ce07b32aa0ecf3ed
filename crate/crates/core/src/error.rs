//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A distribution function was evaluated exactly at its pole.
    #[error("distribution pole at beta*(omega - mu) = 0; caller must regularize")]
    DistributionPole,

    /// A grid does not cover enough of the function it is supposed to hold.
    #[error("grid coverage too small: {context} (missing fraction {missing:.3e})")]
    GridCoverage { context: String, missing: f64 },

    /// Adaptive quadrature ran out of subdivisions before reaching tolerance.
    #[error("quadrature tolerance not met: requested {requested:.3e}, achieved {achieved:.3e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    /// Root bracketing failed over the searched interval.
    #[error("no sign change found while bracketing: {0}")]
    NoBracket(String),

    /// A parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Array dimensions do not match.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
