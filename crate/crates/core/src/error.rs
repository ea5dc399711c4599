use thiserror::Error;

/// Errors surfaced by the tower pipeline and the combinatorial verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("base dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("jet order must be at least 1, got {0}")]
    InvalidOrder(usize),

    #[error("weighted degree must be at least 1, got {0}")]
    InvalidWeight(u32),

    #[error("ambient dimension {ambient} must exceed the variety dimension {dim}")]
    InvalidAmbient { ambient: usize, dim: usize },

    #[error("computation grew to {terms} terms, above the ceiling of {limit}")]
    TooLarge { terms: usize, limit: usize },

    #[error("expected a class in c, h only, homogeneous of grade {expected}")]
    NotBaseClass { expected: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
