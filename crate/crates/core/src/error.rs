use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("numerical degeneracy: {0}")]
    Numerical(String),

    #[error("lower-level solver did not converge after {iterations} iterations (projected gradient norm {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("traces disagree on horizon: expected {expected}, found {found}")]
    HorizonMismatch { expected: usize, found: usize },

    #[error("malformed trace file {path}: {message}")]
    TraceFormat { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 for config problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Json(_) => 2,
            Error::Numerical(_) | Error::NonConvergence { .. } => 3,
            _ => 1,
        }
    }
}
