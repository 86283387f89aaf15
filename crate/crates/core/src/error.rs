use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no body text left after extraction")]
    NoTextExtracted,

    #[error("malformed metadata at `{path}`: {message}")]
    MalformedMetadata { path: String, message: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("malformed idf cache, line {line}: {message}")]
    MalformedIdf { line: usize, message: String },

    #[error("cannot sample {requested} pairs from {available}")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("agreement is degenerate: every rating falls in one category")]
    DegenerateAgreement,

    #[error("majority threshold {threshold} does not exceed half of {raters} raters")]
    ThresholdTooLow { threshold: usize, raters: usize },

    #[error("majority subset is empty")]
    EmptySubset,

    #[error("label matrix is invalid: {0}")]
    InvalidMatrix(String),

    #[error("labels row {row}: {message}")]
    LabelRow { row: usize, message: String },

    #[error("pair `{pair_id}` has {found} raters, expected {expected}")]
    RaggedRaters {
        pair_id: String,
        found: usize,
        expected: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("pairs output missing: {0}")]
    MissingPairs(PathBuf),

    #[error("extraction failed for every paper ({0} attempted)")]
    AllPapersFailed(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
