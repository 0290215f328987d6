use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Schema or consistency problem, located by a JSON pointer.
    #[error("scenario error at {pointer}: {message}")]
    Scenario { pointer: String, message: String },

    #[error("{command} needs a scenario file")]
    MissingScenario { command: String },

    #[error(transparent)]
    Core(#[from] mmd_core::Error),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn at(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Scenario {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// Wraps a core failure raised while interpreting the field at `pointer`.
    pub fn core_at(pointer: &str, err: mmd_core::Error) -> Self {
        CliError::at(pointer, err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
