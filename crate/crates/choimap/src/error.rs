use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        context: &'static str,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("size overflow in {context}: total dimension {dim} exceeds cap {cap}")]
    SizeOverflow {
        context: &'static str,
        dim: usize,
        cap: usize,
    },

    #[error("index out of bounds in {context}: {index} not below {bound}")]
    IndexOutOfBounds {
        context: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("divergent thermal angle: beta*omega = 0 (zero-frequency mode must be treated as a disorder mode)")]
    ThermalAngleDivergence,

    #[error("qnsd pole at omega = 0")]
    QnsdPole,

    #[error("Krylov exponential did not converge within dimension {dim}: achieved residual {achieved:e}, requested {requested:e}")]
    KrylovNoConvergence {
        dim: usize,
        achieved: f64,
        requested: f64,
    },

    #[error("Krylov breakdown: input vector has zero norm")]
    KrylovZeroVector,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-uniform time grid: step {index} has spacing {got} instead of {expected}")]
    NonUniformGrid {
        index: usize,
        got: f64,
        expected: f64,
    },

    #[error("linear algebra backend error: {0}")]
    Linalg(String),

    #[error("snapshot callback failed at step {step}: {source}")]
    SnapshotCallback {
        step: usize,
        source: Box<Error>,
    },

    #[error("model file error: {0}")]
    ModelFile(String),

    #[error("series container error: {0}")]
    SeriesContainer(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
