//! Error type shared across the crate.
//!
//! Variants split into three broad groups that the command-line frontend
//! maps onto exit codes: usage problems (bad arguments, malformed config),
//! data problems (unreadable datasets, degenerate image sets), and numerical
//! failures (loss of positive definiteness, overflow, solver breakdown).

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented precondition (bad dimension, empty
    /// input, out-of-range parameter, unknown option).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix required to be symmetric positive definite is not.
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// `sym_exp` would overflow: an eigenvalue exceeds the safe limit.
    #[error("matrix exponential overflow: eigenvalue {eigenvalue:.3e} exceeds limit {limit}")]
    ExpOverflow { eigenvalue: f64, limit: f64 },

    /// Two operands that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    /// A computation produced values outside its certified range by more
    /// than the documented tolerance (e.g. a cosine far outside [-1, 1]).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A kernel configuration is self-inconsistent (non-positive bandwidth,
    /// zero polynomial degree, unsupported order).
    #[error("invalid kernel specification: {0}")]
    InvalidKernelSpec(String),

    /// An image set carries no usable variation (constant frames, zero
    /// covariance trace), so no covariance representation exists.
    #[error("degenerate image set: {0}")]
    DegenerateSet(String),

    /// A pooled representation collapsed (all-zero kernel matrix).
    #[error("degenerate representation: {0}")]
    DegenerateRepresentation(String),

    /// An alignment operand has zero Frobenius norm, making the alignment
    /// score undefined.
    #[error("degenerate alignment operand: {0}")]
    DegenerateAlignment(String),

    /// The alignment normal equations could not be solved reliably.
    #[error("alignment system is ill-conditioned: {0}")]
    IllConditioned(String),

    /// A Gram matrix failed its positive semidefiniteness check.
    #[error("kernel matrix is not positive semidefinite: {0}")]
    KernelNotPsd(String),

    /// An iterative solver hit its iteration budget before meeting its
    /// stopping rule.
    #[error("solver failed to converge: {0}")]
    ConvergenceFailure(String),

    /// The dataset root exists but contains no class directories.
    #[error("dataset root {0} contains no classes")]
    EmptyDataset(PathBuf),

    /// A class has too few image sets for the requested split.
    #[error("insufficient sets: {0}")]
    InsufficientSets(String),

    /// A frame file exists but cannot be decoded into a grayscale image.
    #[error("cannot decode frame {path}: {reason}")]
    FrameDecode { path: PathBuf, reason: String },

    /// An experiment produced nothing worth writing (no successful splits).
    #[error("invalid result: {0}")]
    InvalidResult(String),

    /// Too many evaluation splits failed to report a trustworthy mean.
    #[error("{failed} of {total} splits failed; first failure: {first}")]
    SplitsFailed {
        failed: usize,
        total: usize,
        first: String,
    },

    /// Wraps an inner error with positional context (item index, window
    /// coordinates, split number).
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attaches positional context to an error, preserving its exit code.
    pub fn with_context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Process exit code for the command-line frontend: 1 for usage errors,
    /// 2 for data/configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::InvalidKernelSpec(_) => 1,
            Error::EmptyDataset(_)
            | Error::InsufficientSets(_)
            | Error::FrameDecode { .. }
            | Error::DegenerateSet(_)
            | Error::Io(_) => 2,
            Error::NotPositiveDefinite(_)
            | Error::ExpOverflow { .. }
            | Error::DimMismatch { .. }
            | Error::Numerical(_)
            | Error::DegenerateRepresentation(_)
            | Error::DegenerateAlignment(_)
            | Error::IllConditioned(_)
            | Error::KernelNotPsd(_)
            | Error::ConvergenceFailure(_)
            | Error::InvalidResult(_)
            | Error::SplitsFailed { .. } => 3,
            Error::Context { source, .. } => source.exit_code(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(Error::InvalidInput("x".into()).exit_code(), 1);
        assert_eq!(Error::EmptyDataset(PathBuf::from("/nowhere")).exit_code(), 2);
        assert_eq!(Error::NotPositiveDefinite("x".into()).exit_code(), 3);
        assert_eq!(
            Error::ConvergenceFailure("x".into())
                .with_context("split 3")
                .exit_code(),
            3
        );
    }

    #[test]
    fn context_prefixes_message() {
        let e = Error::DegenerateSet("constant frames".into()).with_context("window (0, 2)");
        assert_eq!(
            e.to_string(),
            "window (0, 2): degenerate image set: constant frames"
        );
    }
}
