use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "regime error: {operation} requires the {required} regime, but the drive is in {found}"
    )]
    Regime {
        operation: &'static str,
        required: &'static str,
        found: String,
    },

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("trajectory {trajectory} aborted at step {step}: |q| = {value:e} exceeded {limit:e}")]
    Unstable {
        trajectory: usize,
        step: u64,
        value: f64,
        limit: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
