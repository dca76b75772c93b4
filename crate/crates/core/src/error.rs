use thiserror::Error;

/// Errors produced by the statistics toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The exact result does not fit the supported range.
    #[error("range error: {0}")]
    Range(String),

    /// The requested member of the statistic family has no finite value.
    #[error("divergent statistic: stress parameter {0} has no finite computing formula")]
    DivergentStatistic(f64),

    #[error("insufficient data: need {needed}, have {have}")]
    InsufficientData { needed: usize, have: usize },

    /// The sample cannot support the requested fit (e.g. zero variance).
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
