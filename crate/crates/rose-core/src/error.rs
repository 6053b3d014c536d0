use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Evaluation requested too close to a pole of the secular function;
    /// the caller must re-bracket.
    #[error("evaluation at k = {k} is within {distance:e} of a pole")]
    PoleProximity { k: f64, distance: f64 },

    /// A spin configuration with some w_b = ±id has no generic secular
    /// equation.
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("malformed data file: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
