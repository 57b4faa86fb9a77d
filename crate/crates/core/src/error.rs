use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The point lies outside `dom f`, so `∂f` is empty there.
    #[error("point {0:?} lies outside the domain; the subdifferential is empty")]
    OutsideDomain(Vec<f64>),

    #[error("configuration error: {0}")]
    Config(String),

    /// No candidate passed the regime's acceptance checks within budget.
    #[error("step failure: {0}")]
    StepFailure(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
