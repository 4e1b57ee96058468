use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("height cap exceeded: weight of height {height} above cap {cap}")]
    HeightCapExceeded { height: i64, cap: i64 },
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("singular Gram matrix at weight {0}")]
    SingularGram(String),
    #[error("inconsistent intertwiner system at weight {weight}: {relation}")]
    InconsistentUpsilon { weight: String, relation: String },
    #[error("non-integral value where an integral one was required: {0}")]
    NonIntegral(String),
    #[error("bar operator is not involutive: {0}")]
    NotInvolutive(String),
    #[error("bar operator is not unitriangular: {0}")]
    NotTriangular(String),
    #[error("canonical basis solver failed: {0}")]
    Solver(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
