use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Ingest {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Document { path: PathBuf, message: String },

    #[error("lexicon contains no valid entries")]
    EmptyLexicon,

    #[error("manifest {path}: field `{field}`: {message}")]
    Manifest {
        path: PathBuf,
        field: String,
        message: String,
    },

    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),

    #[error("cannot merge tables of corpus `{left}` and `{right}`")]
    CorpusMismatch { left: String, right: String },

    #[error("observation has {found} tokens in a stream of {expected}-grams")]
    MixedNgramLength { expected: usize, found: usize },

    #[error("invalid bin specification: {0}")]
    InvalidBin(String),

    #[error("rolling window must be a positive number of bins")]
    InvalidWindow,

    #[error("power-law fit: {0}")]
    Fit(String),

    #[error("top-k must be positive")]
    InvalidTopK,

    #[error("projection has {nodes} nodes, above the limit of {limit}")]
    TooManyNodes { nodes: usize, limit: usize },

    #[error("{0}")]
    Unsupported(String),

    #[error("malformed {what}: {message}")]
    Format { what: String, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by invalid configuration rather than bad data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Manifest { .. }
                | Error::InvalidBin(_)
                | Error::InvalidWindow
                | Error::InvalidTopK
                | Error::Fit(_)
                | Error::Unsupported(_)
        )
    }

    pub(crate) fn format(what: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            what: what.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
