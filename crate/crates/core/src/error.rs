use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(
        "quadrature did not converge: achieved error estimate {achieved:.3e} exceeds requested {requested:.3e}"
    )]
    Convergence { achieved: f64, requested: f64 },

    /// Harmonic orders whose sum is even contribute identically zero.
    #[error("harmonic ({m}, {n}) has even parity and is identically zero")]
    Parity { m: u32, n: u32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
