use std::path::PathBuf;

use thiserror::Error;

use crate::solver::PathResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dataset needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("time of sample {index} must be strictly positive and finite, got {value}")]
    NonPositiveTime { index: usize, value: f64 },

    #[error("label of sample {index} must be -1 or +1, got {value}")]
    InvalidLabel { index: usize, value: i64 },

    #[error("covariate column {index} is constant")]
    ConstantColumn { index: usize },

    #[error("covariate ({row}, {column}) is not finite")]
    NonFiniteCovariate { row: usize, column: usize },

    #[error("dataset has no feature columns")]
    NoFeatures,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("gradient at zero vanishes in every coordinate; the regularization path cannot start")]
    DegenerateDataset,

    #[error("regularization path exhausted at {max_achieved} nonzero coefficients, target was {target}")]
    TargetUnreachable {
        target: usize,
        max_achieved: usize,
        partial: Box<PathResult>,
    },

    #[error("benchmark aborted: {failed} of {runs} runs failed")]
    BenchmarkAborted { failed: usize, runs: usize },

    #[error("no comparable pairs for the concordance index")]
    NoComparablePairs,

    #[error("empty input")]
    EmptyInput,

    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("cannot parse `{value}` at row {row}, column `{column}`: {reason}")]
    Parse {
        row: usize,
        column: String,
        value: String,
        reason: String,
    },

    #[error("unsupported document format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("corrupt document: {0}")]
    CorruptDocument(String),

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
