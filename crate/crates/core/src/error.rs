use std::path::PathBuf;

use crate::catalog::{CourseId, LearnerId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}: row {row}: field `{field}`: {message}")]
    MalformedRow {
        file: String,
        row: usize,
        field: String,
        message: String,
    },

    #[error("{file}: unexpected header {found:?}, expected {expected:?}")]
    BadHeader {
        file: String,
        found: Vec<String>,
        expected: Vec<String>,
    },

    #[error("interactions reference unknown course ids: {0:?}")]
    DanglingCourses(Vec<CourseId>),

    #[error("scores reference unknown learner ids: {0:?}")]
    UnknownLearners(Vec<LearnerId>),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("split at {timestamp} leaves no evaluable learners ({reason})")]
    EmptySplit { timestamp: i64, reason: String },

    #[error("distributions are over different taxonomies ({left} vs {right} categories)")]
    TaxonomyMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("weight vector must have entries in [0,1] and a positive sum, got {0:?}")]
    InvalidWeights([f64; 7]),

    #[error("learner {0} has an empty training profile")]
    EmptyProfile(LearnerId),

    #[error("candidate pool of {available} items is smaller than k = {k}")]
    PoolTooSmall { available: usize, k: usize },

    #[error("weight strategy `{0}` needs a baseline (lambda = 0) evaluation pass")]
    MissingBaseline(&'static str),

    #[error("oracle instance has {0} candidates, at most 12 are supported")]
    OracleTooLarge(usize),

    #[error("{stage} stage failed")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("csv error in {file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },

    #[error("json error in {file}: {source}")]
    Json {
        file: String,
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

    /// Tags the error with the pipeline stage it came from.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn csv(file: impl std::fmt::Display, source: csv::Error) -> Self {
        Error::Csv {
            file: file.to_string(),
            source,
        }
    }
}
