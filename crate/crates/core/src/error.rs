use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unstable AR model: characteristic root {root} has modulus {modulus} (must be < 1 - 1e-9)", modulus = root.norm())]
    Unstable { root: Complex64 },

    #[error("innovation variance must be positive and finite, got {0}")]
    NonPositiveVariance(f64),

    #[error("pole set is not closed under complex conjugation: {pole} has no partner")]
    ConjugateViolation { pole: Complex64 },

    #[error("pole {pole} lies on or outside the unit circle")]
    PoleOutsideDisk { pole: Complex64 },

    #[error("Yule-Walker system is numerically singular")]
    SingularSystem,

    #[error("polynomial has no non-zero coefficients")]
    DegeneratePolynomial,

    #[error("leading FIR coefficient b[0] must be non-zero")]
    ZeroLeadingCoefficient,

    #[error("lag {max_lag} is too large for a path of length {len}")]
    LagTooLarge { max_lag: usize, len: usize },

    #[error("spectral density {value:e} at omega = {omega} (grid index {index}) is below the positivity floor; regrid or perturb the model")]
    ZeroOnGrid { index: usize, omega: f64, value: f64 },

    #[error("invalid spectrum grid: {0}")]
    InvalidGrid(String),

    #[error("predictive information rate diverges: zero of modulus {modulus} is within 1e-6 of the unit circle")]
    DivergentPIR { modulus: f64 },

    #[error("parameters {params:?} are outside the stability region")]
    OutOfRegion { params: Vec<f64> },

    #[error("covariance matrix of dimension {dim} is not positive definite")]
    NotPositiveDefinite { dim: usize },

    #[error("symmetric eigendecomposition failed for dimension {dim}")]
    EigenFailure { dim: usize },

    #[error("invalid autocovariance sequence: {0}")]
    InvalidAutocov(String),

    #[error("invalid model file: {0}")]
    ModelFile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
