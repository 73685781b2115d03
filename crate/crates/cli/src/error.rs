use std::io;
use std::path::{Path, PathBuf};

use scootsim::metrics::MetricsError;
use scootsim::sim::SimError;
use scootsim::stats::StatsError;
use scootsim::synth::SynthError;
use scootsim::trip_data::{CleanError, OdError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    /// Malformed input data or an input that does not match its schema.
    #[error("{}: {msg}", path.display())]
    Schema { path: PathBuf, msg: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Schema { .. } | CliError::Config(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_owned(), source }
    }

    pub fn clean(path: &Path, e: CleanError) -> Self {
        if e.is_io() {
            let source = match e {
                CleanError::Io(e) => e,
                other => io::Error::other(other.to_string()),
            };
            CliError::io(path, source)
        } else {
            CliError::Schema { path: path.to_owned(), msg: e.to_string() }
        }
    }

    pub fn od(path: &Path, e: OdError) -> Self {
        match e {
            OdError::Io(e) => CliError::io(path, e),
            other => CliError::Schema { path: path.to_owned(), msg: other.to_string() },
        }
    }

    pub fn metrics(path: &Path, e: MetricsError) -> Self {
        if e.is_io() {
            CliError::io(path, io::Error::other(e.to_string()))
        } else {
            CliError::Schema { path: path.to_owned(), msg: e.to_string() }
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Config(e.to_string())
    }
}
