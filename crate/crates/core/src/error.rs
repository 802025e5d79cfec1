use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} positions, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported photon number {0}: transform matrices are registered for N in 2..=4")]
    UnsupportedPhotonNumber(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("covariance not positive definite: offending eigenvalue {0}")]
    NotPositiveDefinite(f64),

    #[error("density is not usable on the tabulation grid: {0}")]
    BadDensity(String),

    #[error("position {position} is not on the detector outcome lattice (size {d0}, shift {shift})")]
    OffLattice { position: f64, d0: f64, shift: f64 },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("batch verification failed: {0}")]
    VerificationFailed(String),

    #[error("malformed event file: {0}")]
    MalformedFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
