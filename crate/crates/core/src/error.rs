use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("null state: cannot normalize a vector of zero norm")]
    NullState,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires a two-level system, got dimension {0}")]
    NotTwoLevel(usize),

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("{name} is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { name: String, deviation: f64 },

    #[error("degenerate collapse operator: eigenvalue gap {gap:.3e} is below {tolerance:.1e}")]
    DegenerateCollapseOperator { gap: f64, tolerance: f64 },

    #[error("Bloch vector length {0} exceeds 1")]
    OutsideBlochBall(f64),

    #[error("density matrix trace {0} differs from 1")]
    BadTrace(f64),

    #[error("density matrix is not pure (purity {0})")]
    NotPure(f64),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("step size too large: norm drift {drift:.3e} exceeds tolerance {tolerance:.1e} at t = {t}")]
    StepSizeTooLarge { t: f64, drift: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ensemble is empty or too small: {0}")]
    Ensemble(String),
}
