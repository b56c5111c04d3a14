use std::io;
use std::path::PathBuf;

use instrank::aggregate::AggregateError;
use instrank::ingest::IngestError;
use instrank::scoring::ScoringError;
use instrank::synth::SynthError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const IO: i32 = 3;
    pub const STRICT_PARSE: i32 = 4;
    pub const ZERO_TRUTH: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{}: {detail}", path.display())]
    BadFile { path: PathBuf, detail: String },
    #[error("venue {venue}: every institution scores zero in truth year {year}; NDCG is undefined")]
    ZeroTruth { venue: String, year: i32 },
    #[error("venue {venue}: {source}")]
    Aggregate {
        venue: String,
        #[source]
        source: AggregateError,
    },
    #[error(transparent)]
    Synth(#[from] SynthError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub fn scores_file(path: impl Into<PathBuf>) -> impl FnOnce(ScoringError) -> CliError {
        let path = path.into();
        move |e| CliError::BadFile {
            path,
            detail: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Io { .. } => exit::IO,
            CliError::Ingest(e) => match e {
                IngestError::FileNotFound { .. } | IngestError::Io { .. } => exit::IO,
                IngestError::MalformedRow { .. } => exit::STRICT_PARSE,
                IngestError::InvalidSchema(_) | IngestError::InvalidYearRange { .. } => exit::CONFIG,
                _ => exit::FAILURE,
            },
            CliError::BadFile { .. } => exit::IO,
            CliError::ZeroTruth { .. } => exit::ZERO_TRUTH,
            CliError::Aggregate { .. } => exit::FAILURE,
            CliError::Synth(SynthError::InvalidParams(_)) => exit::CONFIG,
            CliError::Synth(SynthError::Io { .. }) => exit::IO,
        }
    }
}
