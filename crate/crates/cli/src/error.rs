use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {message}", location(path, *line))]
    Data { path: PathBuf, line: Option<u64>, message: String },

    #[error("{}: schema '{found}' is not supported (expected '{expected}')", path.display())]
    Schema { path: PathBuf, found: String, expected: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] po_core::Error),

    #[error("{failures} of {fits} fits failed; archive written to {}", archive.display())]
    PartialFailure { failures: usize, fits: usize, archive: PathBuf },
}

fn location(path: &std::path::Path, line: Option<u64>) -> String {
    match line {
        Some(l) => format!("{}:{l}", path.display()),
        None => path.display().to_string(),
    }
}

impl CliError {
    /// 0 success, 2 usage error, 3 data error, 4 partial failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if is_config_error(e) => 2,
            CliError::PartialFailure { .. } => 4,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, line: Option<u64>, message: impl Into<String>) -> Self {
        CliError::Data { path: path.into(), line, message: message.into() }
    }
}

fn is_config_error(e: &po_core::Error) -> bool {
    matches!(
        e,
        po_core::Error::InvalidConfig(_) | po_core::Error::InvalidPrior(_) | po_core::Error::Domain { .. }
    )
}
