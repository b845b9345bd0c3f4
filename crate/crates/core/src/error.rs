use thiserror::Error;

/// Errors produced by the simulator and the verification routines.
#[derive(Debug, Error)]
pub enum QstError {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("degenerate reduced block (normality defect {normality_defect:.3e}, unitarity defect {unitarity_defect:.3e})")]
    DegenerateBlock {
        normality_defect: f64,
        unitarity_defect: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QstError>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(QstError::Argument(msg.into()))
}
