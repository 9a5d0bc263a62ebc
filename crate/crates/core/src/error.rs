use thiserror::Error;

/// Errors raised by the operator laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("grid mismatch: expected {expected} samples, got {actual}")]
    GridMismatch { expected: usize, actual: usize },

    #[error("wrong frame kind: {0}")]
    FrameKind(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("not numerically a partial isometry: singular value {sigma:.3e} lies in [{tol:.1e}, 1 - {tol:.1e}]")]
    NotPartialIsometry { sigma: f64, tol: f64 },

    #[error("division guard: |1 - alpha * conj(theta)| = {0:.3e} on the grid")]
    DivisionGuard(f64),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
