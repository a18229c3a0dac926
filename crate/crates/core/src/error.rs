use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevyError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:e}, error {error:e}")]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("value {value:e} outside table range [{lo:e}, {hi:e}]; extend the table")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("grid box too small: leaked mass {leaked:e} exceeds {limit:e}; need half-width >= {required:.3}")]
    BoxTooSmall {
        leaked: f64,
        limit: f64,
        required: f64,
    },

    #[error("series did not reach tolerance after {terms} terms (leftover {leftover:e})")]
    SeriesTruncation { terms: usize, leftover: f64 },

    #[error("precondition failed: condition {condition} is {verdict}")]
    Precondition { condition: String, verdict: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("output error: {0}")]
    Io(String),
}

impl LevyError {
    pub(crate) fn param(field: &str, reason: impl Into<String>) -> Self {
        LevyError::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, LevyError>;
