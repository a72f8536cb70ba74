use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("qubit count {requested} exceeds the dense cap of {cap}")]
    ResourceCap { requested: usize, cap: usize },

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("operator is not unitary: {0}")]
    NotUnitary(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate sample (seed {seed}): {reason}")]
    DegenerateSample { seed: u64, reason: String },

    #[error("did not converge after {iterations} iterations (best objective {best})")]
    Convergence { iterations: usize, best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
