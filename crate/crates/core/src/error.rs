use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent p = {0} outside (1, inf)")]
    InvalidExponent(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("Nyquist frequency {nyquist} does not exceed band limit {band}")]
    Nyquist { nyquist: f64, band: f64 },

    #[error("spectral support violation: {0}")]
    Support(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("curvature condition fails: {0}")]
    Curvature(String),

    #[error("iteration did not converge: {0}")]
    Divergence(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
