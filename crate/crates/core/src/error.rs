use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error(
        "triangle inequality violated: c({i},{k}) = {direct} > c({i},{j}) + c({j},{k}) = {detour} \
         (use metric closure to repair)"
    )]
    NotMetric {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        detour: f64,
    },

    #[error("unsupported {keyword}: {value}")]
    UnsupportedFormat { keyword: String, value: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
