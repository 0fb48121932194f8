use thiserror::Error;

/// Failure classes of the CLI, each with its own exit code.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("certificate failure: {0}")]
    Certificate(String),
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    #[error("blow-up ({reason}) at t = {t}")]
    BlowUp { reason: String, t: f64 },
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Internal(_) => 1,
            LabError::Certificate(_) => 2,
            LabError::Hypothesis(_) => 3,
            LabError::BlowUp { .. } => 4,
        }
    }
}

impl From<gmch_core::Error> for LabError {
    fn from(e: gmch_core::Error) -> Self {
        LabError::Internal(e.into())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Internal(e.into())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Internal(e.into())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Internal(e.into())
    }
}
