use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("position {0:?} is outside the grid")]
    OutOfBounds([f64; 3]),
    #[error("rank-deficient design matrix: rank {rank} < {unknowns} unknowns")]
    RankDeficient { rank: usize, unknowns: usize },
    #[error("non-positive signal {value:e} at gradient {index}")]
    NonPositiveSignal { index: usize, value: f64 },
    #[error("diagonal block {block} is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { block: usize, eigenvalue: f64 },
    #[error("seeds outside the grid: {0:?}")]
    SeedsOutOfBounds(Vec<[f64; 3]>),
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
