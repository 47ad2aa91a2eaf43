use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const ACCURACY: i32 = 2;
    pub const VERIFY: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fracbdi::Error),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn code(&self) -> i32 {
        use fracbdi::Error as E;
        match self {
            CliError::Usage(_) => exit::VALIDATION,
            CliError::Verify(_) => exit::VERIFY,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                E::AccuracyLoss { .. } | E::NonConvergence { .. } | E::Overflow { .. } => exit::ACCURACY,
                _ => exit::VALIDATION,
            },
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
