use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} is outside the admissible range ({reason})")]
    InvalidTime { t: f64, reason: &'static str },

    #[error("coordinate {value} lies outside [0, {upper}]")]
    OutOfDomain { value: f64, upper: f64 },

    #[error("field state violates an invariant: {0}")]
    InvalidState(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("tridiagonal system is singular at row {row}")]
    SingularSystem { row: usize },

    #[error("simulation diverged at t = {t}: norm {norm:e} exceeds the divergence threshold")]
    Divergence { t: f64, norm: f64 },

    #[error("kernel evaluation out of range: {0}")]
    KernelRange(String),

    #[error("not enough usable samples for a fit: {found} (need at least {needed})")]
    TooFewSamples { found: usize, needed: usize },

    #[error("invalid trace data: {0}")]
    InvalidTrace(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
