use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    MalformedJson(#[from] serde_json::Error),

    #[error("missing required key `{key}` at {path}")]
    MissingKey { key: String, path: String },

    #[error("event `{eid}` references unknown object `{oid}`")]
    UnknownObjectReference { eid: String, oid: String },

    #[error("invalid value at {path}: {reason}")]
    InvalidValue { path: String, reason: String },

    #[error("invalid timestamp `{value}` at {path}")]
    InvalidTimestamp { value: String, path: String },

    #[error("{file}: missing header `{header}`")]
    MissingHeader { file: String, header: String },

    #[error("duplicate event id `{0}`")]
    DuplicateEventId(String),

    #[error("duplicate object id `{0}`")]
    DuplicateObjectId(String),

    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing table `{0}`")]
    MissingTable(String),

    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),

    #[error("referential integrity violated: {0}")]
    ReferentialIntegrity(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("unknown object type `{0}`")]
    UnknownObjectType(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("attribute `{0}` is reserved for events")]
    ReservedAttribute(String),

    #[error("similarity provider failed: {0}")]
    SimilarityProvider(String),

    #[error("invalid detector configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "event `{eid}` carries `{attr}` but references {count} instances of `{object_type}` (expected exactly one)"
    )]
    CooccurrenceViolated {
        attr: String,
        object_type: String,
        eid: String,
        count: usize,
    },

    #[error("attribute `{0}` is matched more than once")]
    DuplicateMatch(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("invalid log: {0}")]
    InvalidLog(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(file: impl Into<String>, source: csv::Error) -> Self {
        Error::Csv {
            file: file.into(),
            source,
        }
    }
}
