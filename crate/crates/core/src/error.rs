use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("document {doc} references unknown concept {concept}")]
    DanglingConcept { doc: String, concept: u64 },

    #[error("duplicate {what} id `{id}`")]
    DuplicateId { what: &'static str, id: String },

    #[error("idf is undefined for concept {0}: it occurs in no document")]
    UndefinedIdf(u32),

    #[error("modularity is undefined for a graph without edges")]
    UndefinedModularity,

    #[error("partition covers {got} nodes, graph has {expected}")]
    PartitionSize { expected: usize, got: usize },

    #[error("exhaustive search refused: {nodes} nodes exceeds the limit of {limit}")]
    TooLarge { nodes: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("labelings cover different item sets ({left} vs {right} items)")]
    MismatchedItems { left: usize, right: usize },

    #[error("{path}: not a {expected} file (bad magic header)")]
    BadMagic { path: PathBuf, expected: &'static str },

    #[error("{path}: unsupported format version {found} (expected {expected})")]
    BadVersion { path: PathBuf, found: u32, expected: u32 },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("encoding error: {0}")]
    Encode(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
