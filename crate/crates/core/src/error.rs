use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Input and precondition failures are distinguished from numerical
/// failures so that callers (the CLI in particular) can map them onto
/// different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("polynomial is not simplicial: {reason}")]
    NotSimplicial { reason: String },

    #[error("point is off the variety: |f| = {distance:e} exceeds tolerance {tolerance:e}")]
    OffVariety { distance: f64, tolerance: f64 },

    #[error("constraint matrix is rank deficient (transversality margin {margin:e})")]
    RankDeficient { margin: f64 },

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidInput(_)
                | Error::Precondition(_)
                | Error::NotSimplicial { .. }
                | Error::OffVariety { .. }
                | Error::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
