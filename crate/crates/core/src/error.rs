use thiserror::Error;

/// Errors raised by the basis, quadrature, tableau and integrator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HbvmError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// The stage iteration exhausted its budget or diverged.
    #[error(
        "stage iteration did not converge after {iterations} iterations (last update {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    /// The vector field could not be evaluated (collision, non-finite gradient).
    #[error("evaluation failure: {0}")]
    EvaluationFailure(String),

    #[error("matrix is numerically singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, HbvmError>;
