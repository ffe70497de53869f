use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input outside the model's domain (negative field, angle out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration failed at t = {t:e} s: step size {h:e} underflowed ({steps} accepted steps)")]
    Integration { t: f64, h: f64, steps: usize },

    /// The quantity is a ratio whose denominator vanished.
    #[error("zero slope: {0}")]
    ZeroSlope(String),

    #[error("insufficient information: {0}")]
    Insufficient(String),

    #[error("Fock truncation too small: {0}")]
    Truncation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
