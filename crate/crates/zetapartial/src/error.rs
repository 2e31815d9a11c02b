//! Error type shared across the crate.
//!
//! Variants map onto the process exit codes used by the CLI: I/O errors exit
//! with 4, numerical failures (boundary zeros that survive nudging, winding
//! sums that refuse to settle on an integer, refinement that hits its depth
//! cap, floating overflow) exit with 3, and everything else is an ordinary
//! usage or domain error. Bound violations are not errors; they are reported
//! as flags and mapped to exit code 2 by the CLI.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A query reached past the range a table or sum was built for.
    #[error("range error: {0}")]
    Range(String),

    /// A requested table would exceed the configured memory cap.
    #[error("capacity error: table of {requested} entries exceeds cap {cap}")]
    Capacity { requested: u64, cap: u64 },

    /// Integer arithmetic overflowed while building a table.
    #[error("overflow: {0}")]
    Overflow(String),

    /// The partial sum is the constant 1 (only the n = 1 term survives);
    /// it has no zeros and no containment strip.
    #[error("partial sum is constant; no zeros exist and no strip is defined")]
    ConstantPolynomial,

    /// A contour sample landed on (or numerically indistinguishably close
    /// to) a zero. Callers retry with a perturbed contour.
    #[error("boundary zero near s = {re} + {im}i (|value| below tolerance)")]
    BoundaryZero { re: f64, im: f64 },

    /// Phase tracking or root refinement failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Exit code the CLI should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 4,
            Error::BoundaryZero { .. } | Error::Numerical(_) | Error::Overflow(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
