use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A denominator factor `1 + i·c` of a rising-factorial ratio vanished.
    #[error("zero denominator factor at index {index} (c = {c})")]
    ZeroDenominator { index: usize, c: f64 },

    /// Urn weights must be finite, nonnegative and not both zero.
    #[error("invalid urn weights a = {a}, b = {b}")]
    InvalidWeights { a: f64, b: f64 },

    /// One of `a + (n-1)c >= 0`, `b + (n-1)c >= 0` fails.
    #[error("inadmissible parameters: {bound} violated by {slack:e}")]
    Inadmissible { bound: &'static str, slack: f64 },

    /// `a + b + c = 0` makes the variance formula singular.
    #[error("variance undefined: a + b + c = 0")]
    SingularVariance,

    /// A precondition on a named argument failed.
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    /// Sampled table ingestion failed.
    #[error("sampled table: {0}")]
    Table(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
