use thiserror::Error;

/// Errors reported by the numeric and file-format layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: |m[{row}][{col}] - conj(m[{col}][{row}])| = {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("zero matrix has no dominant direction")]
    ZeroMatrix,

    #[error("eigen iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("quadrature did not converge on [{lower}, {upper}] (error estimate {estimate:e})")]
    QuadratureFailed { lower: f64, upper: f64, estimate: f64 },

    #[error("quadratic form has imaginary residual {residual:e} (value {value:e}); covariance is not Hermitian")]
    ImaginaryResidual { value: f64, residual: f64 },

    #[error("quadratic form is negative ({value:e}); covariance is not positive semidefinite")]
    NegativePower { value: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("user {index} at (theta={theta_deg:.4} deg, phi={phi_deg:.4} deg) lies outside grid coverage")]
    UserOutsideGrid { index: usize, theta_deg: f64, phi_deg: f64 },

    #[error("unknown scenario '{name}'; available: {available}")]
    UnknownScenario { name: String, available: String },

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
