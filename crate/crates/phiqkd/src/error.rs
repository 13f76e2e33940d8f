//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by the discrimination, key-rate, and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("overlap angle theta = {0} is outside (0, pi/2]")]
    ThetaOutOfRange(f64),

    #[error("tilt angle phi = {phi} is outside [0, {max}] for this signal pair")]
    TiltOutOfRange { phi: f64, max: f64 },

    #[error("cannot normalize a zero state vector")]
    ZeroKet,

    #[error("supplied columns are not mutually orthonormal (residual {residual:.3e})")]
    NonOrthonormalColumns { residual: f64 },

    #[error("orthonormal completion failed: spanned subspace is degenerate")]
    CompletionFailed,

    #[error("inconclusive element is not positive semi-definite (phi outside the valid domain?)")]
    PovmNotPositive,

    #[error("measurement element has rank above one and admits no rank-1 dilation vector")]
    NotRankOne,

    #[error("no sign change on the search bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("all outcomes are inconclusive; accuracy and error rate are undefined")]
    NoConclusiveOutcomes,

    #[error("invalid finite-key parameters: {0}")]
    InvalidFiniteKeyParams(&'static str),

    #[error("only {sifted} sifted bits but {needed} are needed for parameter estimation")]
    InsufficientSiftedBits { sifted: u64, needed: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
