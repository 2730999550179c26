use std::fmt;

/// Failure classes, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or parameter values (exit 1).
    Usage(String),
    /// File system failure (exit 1).
    Io(String),
    /// Input data failed validation (exit 2).
    Data(String),
    /// The computation has no defined result, e.g. every cohort degenerate (exit 3).
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Data(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }

    pub fn io(path: &std::path::Path, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Degenerate(m) => write!(f, "degenerate result: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type Result<T> = std::result::Result<T, CliError>;
