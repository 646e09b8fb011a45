use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto process exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input violates a structural invariant (normalisation, ordering, sign).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative search failed to bracket or converge.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// The requested quantity is undefined for this input (e.g. an infinite functional value).
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
