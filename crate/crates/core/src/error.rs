use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("parse error in {what} at {location}: {message}")]
    Parse {
        what: &'static str,
        location: String,
        message: String,
    },

    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("need at least {needed} points, got {actual}")]
    TooFewPoints { needed: usize, actual: usize },

    #[error("degenerate point set: {0}")]
    Degenerate(&'static str),

    #[error("empty point cloud")]
    EmptyCloud,

    #[error("cloud has no category labels")]
    Unlabeled,

    #[error("planes share point indices")]
    OverlappingPlanes,

    #[error("no segmented plane matched a ground-truth plane")]
    NoMatches,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image decoding failed: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: &'static str, location: impl ToString, message: impl ToString) -> Self {
        Error::Parse {
            what,
            location: location.to_string(),
            message: message.to_string(),
        }
    }
}
