use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid language spec: {0}")]
    InvalidSpec(String),

    #[error("token {token} at position {position} is outside the vocabulary of size {vocab_size}")]
    TokenOutOfVocab {
        token: u32,
        position: usize,
        vocab_size: u32,
    },

    #[error("vocabulary mismatch: expected {expected}, document {document} has {found}")]
    VocabMismatch { expected: u32, found: u32, document: usize },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("n-gram order {0} is not supported (expected 1, 2 or 3)")]
    BadOrder(usize),

    #[error("no continuation for context {0:?} at any order")]
    DeadEnd(Vec<u32>),

    #[error("malformed model file at line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },

    #[error("bad magic bytes: not a packed corpus file")]
    BadMagic,

    #[error("unsupported corpus format version {found} (this build reads {supported})")]
    VersionMismatch { found: u32, supported: u32 },

    #[error("token {0} does not fit in 16 bits")]
    TokenTooWide(u32),

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("truncated corpus file: {0}")]
    Truncated(String),

    #[error("corpus family {0} is not a Dyck family")]
    NotDyck(String),

    #[error("invalid loss curve: {0}")]
    InvalidCurve(String),

    #[error("target loss {target} not reached (curve minimum {minimum})")]
    NotReached { target: f64, minimum: f64 },

    #[error("marginal rate of substitution undefined: both points have {0} pre-pretraining steps")]
    EqualPretrainingSteps(f64),

    #[error("points are not on one indifference level: losses {0} and {1}")]
    NotIndifferent(f64, f64),

    #[error("non-positive token total: {0}")]
    NonPositive(f64),

    #[error("invalid retrieval request: {0}")]
    Retrieval(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("manifest encoding: {0}")]
    Manifest(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
