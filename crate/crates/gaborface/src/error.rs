use std::io;
use std::path::{Path, PathBuf};

/// Errors from reading inputs, writing outputs or running a stage.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A file exists but its contents are malformed.
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    /// Inputs are inconsistent with each other or with the configuration.
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] gaborface_core::Error),

    #[error("worker pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn format(path: &Path, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 for bad input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Format { .. } | Error::Validation(_) | Error::Core(_) => 1,
            Error::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => 1,
            Error::Io { .. } | Error::Pool(_) => 2,
        }
    }
}
