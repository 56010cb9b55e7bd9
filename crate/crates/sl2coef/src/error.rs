use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {func} at {at}")]
    Pole { func: &'static str, at: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{func} did not converge within {limit} terms")]
    NonConvergence { func: &'static str, limit: usize },
    #[error("accuracy target {target:e} not reached (estimate {estimate:e})")]
    Accuracy { estimate: f64, target: f64 },
    #[error("route not applicable: {0}")]
    RouteInapplicable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
