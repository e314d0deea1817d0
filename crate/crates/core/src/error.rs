use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse {raw:?}")]
    BadCell {
        row: usize,
        column: String,
        raw: String,
    },

    #[error("schema: {0}")]
    Schema(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("feature `{0}` has zero variance")]
    ZeroVariance(String),

    #[error("dataset contains a single class")]
    SingleClass,

    #[error("record has no label")]
    Unlabelled,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing feature `{0}`")]
    MissingFeature(String),

    #[error("feature `{feature}` = {value} outside valid range {range}")]
    OutOfRange {
        feature: String,
        value: f64,
        range: String,
    },

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("ensemble member {index} ({kind}): {source}")]
    Member {
        index: usize,
        kind: String,
        #[source]
        source: Box<Error>,
    },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("bundle corrupt: {0}")]
    Corrupt(String),

    #[error("bundle version {found} is newer than supported version {supported}")]
    Version { found: u32, supported: u32 },

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the input data or configuration rather than
    /// by a bug or the environment.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Io { .. } | Error::Json(_) => false,
            Error::Member { source, .. } | Error::Fold { source, .. } => source.is_data_error(),
            _ => true,
        }
    }
}
