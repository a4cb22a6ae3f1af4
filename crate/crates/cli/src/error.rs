use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] dt_lidar_core::Error),

    #[error("invalid {field}: {reason}")]
    Usage { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed report {path}: {reason}")]
    Report { path: String, reason: String },
}

impl CliError {
    pub fn usage(field: &str, reason: impl Into<String>) -> Self {
        CliError::Usage {
            field: field.to_owned(),
            reason: reason.into(),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Process exit status: 1 for invalid input, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Core(e) if e.is_io() => 2,
            _ => 1,
        }
    }
}
