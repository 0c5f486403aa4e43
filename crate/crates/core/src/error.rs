//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Measure, classifier or metric parameters violate an invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The two measures cannot be compared by the requested operation
    /// (cross-family density ratios, incomparable supports, ...).
    #[error("unsupported measure pair: {0}")]
    UnsupportedPair(String),

    /// An input point lies outside the mapping's declared domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact computation was requested on a variant that only supports
    /// Monte Carlo evaluation.
    #[error("capability error: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedPair(msg.into())
    }
}
