use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not complex symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not normal (residual {0:.3e})")]
    NotNormal(f64),
    #[error("matrices do not commute (commutator norm {0:.3e})")]
    NotCommuting(f64),
    #[error("matrix contains non-finite entries")]
    NotFinite,
    #[error("malformed matrix: {0}")]
    Malformed(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("unknown ensemble `{0}`")]
    UnknownEnsemble(String),
    #[error("tensor has no terms")]
    EmptyTensor,
    #[error("coefficients are linearly dependent")]
    DependentPair,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("inputs violate the max-modulus normalization: {0}")]
    NotNormalized(String),
    #[error("zero matrix")]
    ZeroMatrix,
    #[error("|lambda| = {0} is outside [0, 1)")]
    LambdaOutOfRange(f64),
    #[error("ellipse model is degenerate")]
    DegenerateModel,
    #[error("could not match the symmetric factors to the original pair")]
    AmbiguousMatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
