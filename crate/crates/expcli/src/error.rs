use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment `{0}`; `nlkdv list` prints the catalog")]
    UnknownExperiment(String),

    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid experiment `{id}`: {reason}")]
    InvalidSpec { id: String, reason: String },

    #[error("run `{label}` of `{experiment}` failed: {source}")]
    Run {
        experiment: String,
        label: String,
        #[source]
        source: nlkdv::Error,
    },

    #[error("{analysis} analysis of `{experiment}` failed: {source}")]
    Analysis {
        experiment: String,
        analysis: &'static str,
        #[source]
        source: nlkdv::Error,
    },

    #[error("a sweep needs at least one value")]
    EmptySweep,

    #[error("invalid value {value} for sweep parameter `{param}`: {reason}")]
    SweepValue { param: String, value: f64, reason: String },

    #[error("unknown {what} `{given}`, expected one of: {expected}")]
    UnknownName {
        what: &'static str,
        given: String,
        expected: &'static str,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("cannot serialize the summary: {0}")]
    Serialize(#[source] serde_json::Error),

    #[error("cannot start the worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
