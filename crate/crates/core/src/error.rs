//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by channel construction, posynomial algebra, the GP
/// solver, and the SCA driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{0} must be strictly positive")]
    NonPositive(String),

    #[error("{0} must be finite")]
    NonFinite(String),

    #[error("posynomial must contain at least one monomial")]
    EmptyPosynomial,

    #[error("evaluation point must be strictly positive in every component")]
    NonPositiveEvaluationPoint,

    #[error("condensation weights invalid: {0}")]
    InvalidWeights(String),

    #[error("geometric program has no constraints; the objective is unbounded")]
    UnconstrainedGp,

    #[error("invalid power delay profile: {0}")]
    InvalidPdp(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time-average oracle needs at least {required} samples per period, got {got}")]
    OracleSamplingTooCoarse { required: usize, got: usize },

    #[error("every tone has zero concatenated gain; the backscatter SNR is identically zero")]
    AllTonesZeroGain,

    #[error("inner GP solve failed: {0}")]
    GpSolveFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
