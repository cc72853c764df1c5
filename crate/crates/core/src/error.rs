use thiserror::Error;

/// Errors produced by the compiler and its supporting algorithms.
///
/// Infeasibility of a lifting or bounded-error instance is *not* an error; those
/// solvers return `Ok(None)` so that searches can branch on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("malformed transaction sequence: {0}")]
    MalformedSequence(String),
    #[error("table synthesis failed: {0}")]
    Synthesis(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("enumeration refused: {0}")]
    Refused(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
