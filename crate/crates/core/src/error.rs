use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space spec: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (best residual {best_residual:.3e}, tolerance {tol:.3e})"
    )]
    NotConverged {
        iterations: usize,
        best_residual: f64,
        tol: f64,
    },

    #[error("operator of order {n} exceeds the dense limit {limit}; use the Lanczos solver")]
    TooLargeForDense { n: usize, limit: usize },

    #[error("rank-deficient design matrix: {0}")]
    RankDeficient(String),

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("extrapolation series rejected: {0}")]
    Series(String),

    #[error("cache corrupt: {0}")]
    CacheCorrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
