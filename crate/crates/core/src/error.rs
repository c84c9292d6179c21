use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// The sampled function has not decayed at the edge of its grid, so the
    /// truncated integral over the box is not a faithful transform.
    #[error("truncation: boundary magnitude {boundary:.3e} exceeds {threshold:.1e} of peak {peak:.3e}")]
    Truncation {
        boundary: f64,
        peak: f64,
        threshold: f64,
    },

    /// Two objects that must share a grid or configuration do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Same as [`Error::Truncation`] but raised during time stepping.
    #[error("truncation at t = {time:.4e}: boundary magnitude {boundary:.3e}")]
    TruncationAt { time: f64, boundary: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(op: &'static str, msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain {
        op,
        msg: msg.into(),
    })
}
