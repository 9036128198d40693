use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("blow-up detected at t = {t}: |u(x0, t)| = {magnitude:e}")]
    BlowUpDetected { t: f64, magnitude: f64 },

    #[error("nonlinear substep is singular at t = {t} (focusing pointwise blow-up)")]
    SubstepSingular { t: f64 },

    #[error("Picard iteration did not converge at t = {t} after {iterations} iterations (last update {last_update:e})")]
    PicardDiverged {
        t: f64,
        iterations: usize,
        last_update: f64,
    },

    #[error("time {t} is not on the charge grid (dt = {dt}, horizon = {horizon})")]
    GridMismatch { t: f64, dt: f64, horizon: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonFinite { .. } => "NonFinite",
            Error::BlowUpDetected { .. } => "BlowUpDetected",
            Error::SubstepSingular { .. } => "SubstepSingular",
            Error::PicardDiverged { .. } => "PicardDiverged",
            Error::GridMismatch { .. } => "GridMismatch",
            Error::Serialization(_) => "Serialization",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
