use std::path::PathBuf;

use hpppt_core::baselines::BaselineError;
use hpppt_core::SolveError;
use thiserror::Error;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Bayes rule with a zero normaliser.
    #[error("degenerate belief update: {0}")]
    Degenerate(String),

    #[error("world file line {line}: {message}")]
    World { line: usize, message: String },

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Instance(#[from] hpppt_core::Error),

    #[error(transparent)]
    Solve(#[from] SolveError),

    #[error(transparent)]
    Baseline(#[from] BaselineError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
