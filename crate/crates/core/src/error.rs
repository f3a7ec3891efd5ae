//! Library error type.

use thiserror::Error;

/// Errors produced by waveform operations and analysis pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// Two waveforms were combined but their sample rates differ.
    #[error("sample rate mismatch: {a_hz} Hz vs {b_hz} Hz")]
    RateMismatch { a_hz: f64, b_hz: f64 },

    /// A numeric argument was outside its valid domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Preamble correlation found no frame in the waveform.
    #[error("no frame found: {0}")]
    NoFrame(String),

    /// A symbol or sample window fell outside the waveform.
    #[error("window out of range: {0}")]
    WindowOutOfRange(String),

    /// Calibration could not separate the requested populations.
    #[error("calibration failed: {0}")]
    Calibration(String),

    /// Input data (scene, plan, report) failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
