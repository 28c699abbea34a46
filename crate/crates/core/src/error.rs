use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed srcML XML at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error(
        "srcML unit `{file}` has no position attributes; regenerate the XML with \
         position tracking enabled (e.g. `srcml --position`)"
    )]
    MissingPositions { file: String },

    #[error("srcML unit is missing the `{attribute}` attribute")]
    MissingAttribute { attribute: &'static str },

    #[error("{path}:{line}: {message}")]
    ListFormat { path: String, line: usize, message: String },

    #[error("cannot read `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("srcML converter failed: {0}")]
    Converter(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
