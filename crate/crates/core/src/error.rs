//! Error type shared across the simulation core.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A waveform or filter parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Requested spectral content cannot be represented at the sample rate.
    #[error("Nyquist violation: {0}")]
    Nyquist(String),

    /// A band lies (partly) outside the representable spectrum.
    #[error("band out of range: {0}")]
    BandOutOfRange(String),

    /// Two records that must agree in length or rate do not.
    #[error("signal mismatch: {0}")]
    Mismatch(String),

    /// An operation needs nonzero power/energy where there is none.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical solve failed to bracket or converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
