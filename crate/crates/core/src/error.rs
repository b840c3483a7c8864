use std::path::PathBuf;

use thiserror::Error;

use crate::domain::DomainId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown type symbol `{0}`")]
    UnknownType(String),

    #[error("unknown domain {0}")]
    UnknownDomain(DomainId),

    #[error("domain id {0} is already in use")]
    DuplicateId(DomainId),

    #[error("duplicate criterion value `{value}` in partition of {domain}")]
    DuplicateValue { domain: DomainId, value: String },

    #[error("partition of {domain} refers to unknown member {member}")]
    DanglingMember { domain: DomainId, member: DomainId },

    #[error("partition of {domain} has {cells} cells but the domain holds only {cardinality}")]
    CardinalityExceeded {
        domain: DomainId,
        cells: usize,
        cardinality: String,
    },

    #[error("{domain} has no partition {index}")]
    PartitionOutOfRange { domain: DomainId, index: usize },

    #[error("partition {partition} of {domain} has no cell {index}")]
    CellOutOfRange {
        domain: DomainId,
        partition: usize,
        index: usize,
    },

    #[error("generic domain {0} is immutable")]
    GenericDomain(DomainId),

    #[error("generic domain {0} has no activation")]
    NotActivatable(DomainId),

    #[error("type hierarchy has a cycle through `{0}`")]
    Cycle(String),

    #[error("type `{child}` declares unknown parent `{parent}`")]
    UnknownParent { child: String, parent: String },

    #[error("type `{0}` declared twice")]
    DuplicateType(String),

    #[error("part `{role}` of `{whole}` has undeclared type `{part}`")]
    DanglingPart {
        whole: String,
        role: String,
        part: String,
    },

    #[error("lexicon entry `{surface}`: {message}")]
    Lexicon { surface: String, message: String },

    #[error("scene entity `{0}` declared twice")]
    DuplicateEntity(String),

    #[error("invalid grouping parameters: {0}")]
    InvalidParams(String),

    #[error("unknown token `{token}` at position {position}")]
    UnknownToken { token: String, position: usize },

    #[error("no parse at token {position}: {message}")]
    NoParse { position: usize, message: String },

    #[error("context invariant violated: {0}")]
    Invariant(String),

    #[error("gold annotation {index}: {message}")]
    Gold { index: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
