//! Crate-wide error type.

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

    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("{file}, row {row}, group `{group}`: {message}")]
    CsvParse {
        file: String,
        row: usize,
        group: String,
        message: String,
    },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("frame count mismatch: {0}")]
    FrameCountMismatch(String),

    #[error("length mismatch: left {left}, right {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {min} values, got {got}")]
    TooShort { min: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("zero variance in {0}")]
    ZeroVariance(String),

    #[error("{0} is empty")]
    Empty(String),

    #[error("system not solvable: {0}")]
    Singular(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("unknown report format `{0}` (expected json, csv, or markdown)")]
    UnknownFormat(String),

    #[error("config: {0}")]
    Config(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("repetition {repetition}, scenario `{scenario}`, {stage}: {source}")]
    Experiment {
        repetition: usize,
        scenario: String,
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps an error with the experiment coordinates it occurred at.
    pub fn in_experiment(
        self,
        repetition: usize,
        scenario: impl Into<String>,
        stage: impl Into<String>,
    ) -> Self {
        Error::Experiment {
            repetition,
            scenario: scenario.into(),
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}
