use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the drift engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty reference column")]
    EmptyReferenceColumn,

    #[error("reference span too short: span {span} is shorter than window {window}")]
    ReferenceSpanTooShort { span: String, window: String },

    #[error("incompatible histograms")]
    IncompatibleHistograms,

    #[error("missing column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),

    #[error("schema mismatch, missing feature(s): {}", .0.join(", "))]
    SchemaMismatch(Vec<String>),

    #[error("unparseable timestamp {value:?} at row {row}")]
    BadTimestamp { row: usize, value: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("unknown feature: {0}")]
    UnknownFeature(String),

    #[error("unknown attribute {attribute:?} for feature {feature:?}")]
    UnknownAttribute { attribute: String, feature: String },

    #[error("lineage cycle: {}", .0.join(" -> "))]
    LineageCycle(Vec<String>),

    #[error("lineage references unknown feature: {0}")]
    UnknownLineageNode(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("invalid thresholds: require 0 < alpha ({alpha}) < analysis_threshold ({analysis_threshold})")]
    InvalidThresholds { alpha: f64, analysis_threshold: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid duration {0:?}")]
    InvalidDuration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
