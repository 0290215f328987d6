use thiserror::Error;

/// Errors raised by the operator-algebra engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group presentation: {0}")]
    InvalidPresentation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid tensor leg selection: {0}")]
    InvalidLegs(String),

    #[error("invalid representation: {0}")]
    RepresentationInvalid(String),

    #[error("eigenvalue {eigenvalue} is not within {tolerance:e} of an allowed root of unity")]
    SpectralMismatch { eigenvalue: String, tolerance: f64 },

    #[error("containment error: {0}")]
    NotContained(String),

    #[error("span closure did not stabilise within {rounds} rounds")]
    IterationCap { rounds: usize },

    #[error("internal tolerance failure: {0}")]
    InternalTolerance(String),

    #[error("cannot condition on an outcome set of probability {probability:e}")]
    Conditioning { probability: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("total dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("state is not of branch form: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("crossed-product pictures are not conjugate (residual {residual:e})")]
    EquivalenceFailure { residual: f64 },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
}

pub type Result<T> = std::result::Result<T, Error>;
