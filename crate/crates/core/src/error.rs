use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("ply: {0}")]
    Ply(String),

    #[error("failed to load texture {}: {message}", path.display())]
    TextureLoad { path: PathBuf, message: String },

    #[error("degenerate triangle")]
    DegenerateGeometry,

    #[error("mesh has no sampleable surface")]
    EmptySurface,

    #[error("point cloud is empty")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
