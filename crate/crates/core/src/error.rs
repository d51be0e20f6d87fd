use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A theoretical hypothesis on the parameters (e.g. an upper bound on gamma) fails.
    #[error("admissibility error: {0}")]
    Admissibility(String),
    /// Algorithm-level hypothesis (e.g. positive descent margin) fails.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A solver hit one of its safety caps.
    #[error("solver aborted: {0}")]
    Abort(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
