//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Tensor or label dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A configuration value is out of its legal range.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// An input is structurally too small to operate on (empty corpus,
    /// sentence shorter than the convolution window, empty candidate list).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// An input violates a documented invariant.
    #[error("validation failed: {0}")]
    Validation(String),
    /// A referenced id is not present in the indexed structure.
    #[error("lookup failed: {0}")]
    Lookup(String),
    /// A line of an input file does not match its grammar.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// An operation was invoked before its prerequisites ran.
    #[error("invalid state: {0}")]
    State(String),
    /// A loss closure handed to the gradient checker is not deterministic.
    #[error("non-deterministic loss closure: {0}")]
    Determinism(String),
    /// The requested training strategy is not supported.
    #[error("unsupported strategy: {0}")]
    UnsupportedStrategy(String),
}

pub type Result<T> = std::result::Result<T, Error>;
