use thiserror::Error;

/// Errors produced by the moment checks, the repairs and the input layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The inertia tensor cannot belong to any real mass distribution.
    #[error("infeasible inertia: {0}")]
    InfeasibleInertia(String),

    /// No repair of the requested kind exists for this body.
    #[error("no repair: {0}")]
    NoRepair(String),

    /// Malformed job or robot-description input, with the offending location.
    #[error("input error at {location}: {message}")]
    Input { location: String, message: String },
}

impl Error {
    pub(crate) fn input(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Input {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
