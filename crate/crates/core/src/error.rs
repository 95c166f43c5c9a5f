use thiserror::Error;

/// Errors produced by the estimators, selectors and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied value is outside its documented domain.
    #[error("invalid input `{field}`: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    /// A combination of settings that cannot be evaluated.
    #[error("invalid configuration `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    /// A local fit had too few points inside its kernel window.
    #[error("bandwidth {h} too small at x0 = {x0}: {reason}")]
    BandwidthTooSmall {
        h: f64,
        x0: f64,
        reason: &'static str,
    },

    #[error("length mismatch for `{field}`: expected {expected}, got {got}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },

    /// An adaptive integration or iterative routine missed its tolerance.
    #[error(
        "numeric tolerance not reached in {context}: estimated error {estimate:e} > {tolerance:e}"
    )]
    NumericTolerance {
        context: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn input(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical tolerance rather than of validation.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NumericTolerance { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
