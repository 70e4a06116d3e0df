use std::path::PathBuf;

use rankperm_core::Error as CoreError;

/// Everything a subcommand can fail with, each mapped to a stable exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: u64, column: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn parse(line: u64, column: usize, message: impl Into<String>) -> Self {
        CliError::Parse { line, column, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for bad input, 3 for an infeasible model, 4 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidDataset(_) | CoreError::Domain(_) => 2,
                CoreError::InfeasibleBounds { .. } | CoreError::IsolatedNode => 3,
                CoreError::Capacity { .. } | CoreError::NoConvergence { .. } | CoreError::DegenerateNull => 4,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(CliError::parse(1, 1, "x").exit_code(), 2);
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(CoreError::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(CoreError::IsolatedNode).exit_code(), 3);
        assert_eq!(CliError::from(CoreError::DegenerateNull).exit_code(), 4);
    }
}
