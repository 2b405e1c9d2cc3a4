use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch ({left_rows}x{left_cols} vs {right_rows}x{right_cols})")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("{op}: matrix must be square, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("{op}: matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { op: &'static str, deviation: f64 },
    #[error("{op}: non-finite value encountered")]
    NonFinite { op: &'static str },
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("eigendecomposition did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error(
        "char_coeffs: n = {n} exceeds the minor-enumeration limit {max}; use eigenvalue route"
    )]
    TooLarge { n: usize, max: usize },
    #[error("{op}: value has imaginary residue {residue:e} above tolerance")]
    NotReal { op: &'static str, residue: f64 },
    #[error("{op}: matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    Singular { op: &'static str, condition: f64 },
    #[error("invalid mode configuration: {0}")]
    InvalidConfig(String),
    #[error("{op}: tail weight {weight:e} exceeds {limit:e} at dim {dim}; increase dim")]
    TailGuard {
        op: &'static str,
        weight: f64,
        limit: f64,
        dim: usize,
    },
    #[error("{op}: excitation {excitation} does not fit in dim {dim} with the top-level buffer; increase dim")]
    ExcitationGuard {
        op: &'static str,
        excitation: f64,
        dim: usize,
    },
    #[error("{op}: states live on different mode configurations")]
    ConfigMismatch { op: &'static str },
    #[error("{op}: invalid state: {reason}")]
    InvalidState { op: &'static str, reason: String },
    #[error("{op}: {reason}")]
    InvalidArgument { op: &'static str, reason: String },
    #[error("williamson: covariance matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
}
