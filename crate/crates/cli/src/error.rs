use thiserror::Error;

/// Failure of one CLI run, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{context}: {source}")]
    Numerical { context: String, source: herald_core::Error },
    /// A failed cell of a sweep, with the core error's kind tag
    #[error("{message}")]
    Grid { kind: String, message: String },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } | CliError::Grid { .. } | CliError::Io(_) => 3,
        }
    }

    /// Tag for the machine-readable error line.
    pub fn kind(&self) -> &str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical { source, .. } => source.kind(),
            CliError::Grid { kind, .. } => kind,
            CliError::Io(_) => "io",
        }
    }

    /// Wraps a core error; bad input counts as a configuration error.
    pub fn core(context: impl Into<String>, source: herald_core::Error) -> Self {
        if source.is_input_error() {
            CliError::Config(format!("{}: {source}", context.into()))
        } else {
            CliError::Numerical { context: context.into(), source }
        }
    }
}
