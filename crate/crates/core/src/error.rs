//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Edge-list text could not be parsed. `line` is 1-based.
    Parse { line: usize, message: String },
    /// An edge endpoint or node id fell outside `[0, n)`.
    NodeOutOfRange { line: usize, id: u64, node_count: usize },
    /// A vector argument had the wrong length.
    DimensionMismatch { expected: usize, got: usize },
    /// The damping factor is outside the domain required by the operation.
    InvalidDamping { value: f64 },
    /// An iterative solver did not reach the requested tolerance.
    Convergence { iterations: u32, residual: f64 },
    /// Linear system was singular (resolvent at c = 1).
    SingularSystem,
    /// The decomposition has no ergodic Pure-OUT class; the c -> 1 limit
    /// degenerates and downstream reports are undefined.
    DegenerateStructure { reason: &'static str },
    /// Not enough series coefficients to do what was asked.
    TooFewCoefficients { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
            Error::NodeOutOfRange { line, id, node_count } => {
                write!(f, "line {line}: node id {id} out of range (node count {node_count})")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidDamping { value } => write!(f, "invalid damping factor {value}"),
            Error::Convergence { iterations, residual } => write!(
                f,
                "no convergence after {iterations} iterations (last residual {residual:e})"
            ),
            Error::SingularSystem => write!(f, "singular linear system"),
            Error::DegenerateStructure { reason } => write!(f, "degenerate structure: {reason}"),
            Error::TooFewCoefficients { needed, got } => {
                write!(f, "needs at least {needed} series coefficients, have {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
