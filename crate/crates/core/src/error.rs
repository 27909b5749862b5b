use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dagger| entry = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix is not unitary: max |U U^dagger - I| entry = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not a projector: {reason}")]
    NotProjector { reason: String },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("resource budget exceeded: {requested} > {budget}")]
    ResourceExceeded { requested: usize, budget: usize },

    #[error("eigenvalue {eigenvalue} lies outside the approximation interval ({lower}, {upper})")]
    OutOfRange {
        eigenvalue: f64,
        lower: f64,
        upper: f64,
    },

    #[error("certification failed: {condition} violated at x = {x} (value {value:e}, allowed {allowed:e})")]
    Certification {
        condition: &'static str,
        x: f64,
        value: f64,
        allowed: f64,
    },

    #[error("polynomial modulus {max_modulus} exceeds 1 - margin ({margin:e})")]
    Margin { max_modulus: f64, margin: f64 },

    #[error("numerical failure in {stage}: residual {residual:e}")]
    Numeric { stage: &'static str, residual: f64 },

    #[error("angle synthesis failed at step {step}: residual {residual:e}")]
    Synthesis { step: usize, residual: f64 },

    #[error("quadrature grid too coarse: estimated error {estimate:e} exceeds {allowed:e}")]
    Resolution { estimate: f64, allowed: f64 },

    #[error("projection has zero norm; resample")]
    ZeroProjection,

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
