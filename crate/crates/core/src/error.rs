//! Error type shared by the library modules.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on input data was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An optimization problem has no feasible point.
    #[error("{context}: infeasible")]
    Infeasible { context: String },

    /// An optimization problem is unbounded below.
    #[error("{context}: unbounded")]
    Unbounded { context: String },

    /// The solver gave up (iteration limit or numerical trouble).
    #[error("solver failure: {0}")]
    Solver(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn infeasible(context: impl Into<String>) -> Self {
        Error::Infeasible {
            context: context.into(),
        }
    }

    pub fn unbounded(context: impl Into<String>) -> Self {
        Error::Unbounded {
            context: context.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
