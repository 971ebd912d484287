use thiserror::Error;

/// Everything that can go wrong in the oracles.
///
/// Input problems (`DimensionMismatch`, `DeskScaleLimit`, `Parse`, `Json`)
/// map to CLI exit code 2; a disagreement between two routes that must agree
/// maps to exit code 1.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("desk-scale limit exceeded: {0}")]
    DeskScaleLimit(String),

    #[error("the set is empty")]
    EmptySet,

    #[error("the point does not belong to the set")]
    NotMember,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("qualification failure: {0}")]
    QualificationFailure(String),

    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),

    #[error("indeterminate form: {0}")]
    IndeterminateForm(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }

    /// True for errors caused by malformed or oversized input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. } | Error::DeskScaleLimit(_) | Error::Parse(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::dims(expected, found))
    }
}
