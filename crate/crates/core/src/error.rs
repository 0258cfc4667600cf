use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed row in one of the text formats. `line` is 1-based.
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Resources referenced by a configuration that do not exist.
    #[error("missing resources: {}", .0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    MissingResources(Vec<PathBuf>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero variance")]
    ZeroVariance,

    #[error("feature width mismatch: expected {expected}, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("translation failed: {0}")]
    Translation(String),

    #[error("training failed for {context}: {source}")]
    Training {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Computation(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn training(context: impl Into<String>, source: Error) -> Self {
        Error::Training {
            context: context.into(),
            source: Box::new(source),
        }
    }

    /// Process exit status for command-line front ends:
    /// 1 = computation, 2 = usage/config/format, 3 = I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            Error::Parse { .. }
            | Error::Config(_)
            | Error::MissingResources(_)
            | Error::InvalidInput(_) => 2,
            Error::Training { source, .. } => source.exit_code(),
            Error::ZeroVariance
            | Error::WidthMismatch { .. }
            | Error::Translation(_)
            | Error::Computation(_) => 1,
        }
    }
}
