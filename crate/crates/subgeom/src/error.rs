use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("point lies outside the chart domain of `{label}`")]
    OutsideDomain { label: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("metric is near-singular at the sample point (cond ≈ {cond:.3e})")]
    IllConditioned { cond: f64 },
    #[error("rank-deficient input to Gram-Schmidt (vector {index} degenerate)")]
    Degenerate { index: usize },
    #[error("horizontal stretch factors differ (spread {spread:.3e}): map is not conformal at the point")]
    Anisotropic { spread: f64 },
    #[error("jacobian rank changes across samples ({first} vs {other})")]
    RankJump { first: usize, other: usize },
    #[error("zero-dimensional fiber: mean curvature undefined")]
    EmptyFiber,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
