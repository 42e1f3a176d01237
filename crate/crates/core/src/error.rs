use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse rational `{input}`: {reason}")]
    ParseRational { input: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    /// A computation needs more stored coefficients than the series carries.
    #[error("truncation too short: need {needed} coefficients, have {available}")]
    Truncation { needed: usize, available: usize },

    #[error("rational function did not reduce to a polynomial: {0}")]
    NonCancellation(String),

    #[error("series does not converge: {0}")]
    NotConvergent(String),

    #[error("precision {requested} unreachable: {reason}")]
    PrecisionUnreachable { requested: i64, reason: String },

    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
