use std::path::PathBuf;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(minkprob_core::Error),
    /// Malformed problem spec: parse position or offending field.
    #[error("{source_name}: {location}: {message}")]
    Spec {
        source_name: String,
        location: String,
        message: String,
    },
    #[error("{path}: line {line}: {message}")]
    Csv { path: PathBuf, line: u64, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// A check ran to completion and did not pass.
    #[error("{0}")]
    Failed(String),
}

// the core error type is `no_std` and has no `std::error::Error` impl
impl From<minkprob_core::Error> for CliError {
    fn from(e: minkprob_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn field(source_name: &str, field: &str, message: impl Into<String>) -> Self {
        CliError::Spec {
            source_name: source_name.to_string(),
            location: format!("field `{field}`"),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 3 for solver non-convergence, 1 for I/O failures and failed checks,
    /// 2 for everything the caller can fix in the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(minkprob_core::Error::NonConvergence { .. }) => 3,
            CliError::Io { .. } | CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}
