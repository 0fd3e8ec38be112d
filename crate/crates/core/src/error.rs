use std::path::PathBuf;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or truncated image data. `offset` is the byte position in
    /// the file where decoding gave up.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("region {x},{y} {w}x{h} lies outside a {width}x{height} image")]
    Bounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    /// Container construction or operation called with inconsistent inputs.
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn argument(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
