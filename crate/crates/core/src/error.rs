use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown activation {0:?}")]
    UnknownActivation(String),

    #[error("unknown policy {name:?}; valid ids: {valid}")]
    UnknownPolicy { name: String, valid: String },

    #[error("unknown aggregation {0:?}; valid ids: Individual, Local, Global")]
    UnknownAggregation(String),

    #[error("infeasible split: {0}")]
    InfeasibleSplit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid decision matrix: {0}")]
    InvalidMatrix(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("run {run_id} of dataset {dataset_id:?} has no member of architecture {architecture}")]
    MissingArchitecture {
        dataset_id: String,
        run_id: u32,
        architecture: String,
    },

    #[error("misaligned comparison keys: {0}")]
    MisalignedKeys(String),

    #[error("malformed input{}: {message}", path.as_ref().map(|p| format!(" in {}", p.display())).unwrap_or_default())]
    Malformed {
        path: Option<PathBuf>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn malformed(message: impl Into<String>) -> Self {
        Error::Malformed {
            path: None,
            message: message.into(),
        }
    }
}
