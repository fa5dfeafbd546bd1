//! Command-line front end for the outdyn library: experiment files in,
//! CSV tables and certificates out.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub mod config;
pub mod output;
pub mod run;

pub use config::{load_config, parse_config, ExperimentConfig, Kind};
pub use run::{run_experiment, verify_cert_text, Outcome, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed experiment file: {0}")]
    Syntax(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("automorphism {name:?}: {source}")]
    Automorphism { name: String, source: outdyn::Error },
    #[error("unknown automorphism {0:?}")]
    UnknownAutomorphism(String),
    #[error("unknown experiment kind {0:?}")]
    UnknownKind(String),
    #[error("the experiment needs `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Core(#[from] outdyn::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv output: {0}")]
    Csv(String),
}

impl CliError {
    /// Every error is a usage or input problem, reported as exit status 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Writes the outcome: the main table to `out` (or stdout) and each sidecar
/// next to it. Without a path, sidecars follow the table on stdout.
pub fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<(), CliError> {
    let stdout_err = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match out {
        Some(path) => {
            output::write_atomic(path, &outcome.main.to_bytes()?)?;
            for (suffix, artifact) in &outcome.sidecars {
                output::write_atomic(&output::sibling(path, suffix), &artifact.to_bytes()?)?;
            }
        }
        None => {
            let mut lock = io::stdout().lock();
            lock.write_all(&outcome.main.to_bytes()?).map_err(stdout_err)?;
            for (_, artifact) in &outcome.sidecars {
                lock.write_all(b"\n").map_err(stdout_err)?;
                lock.write_all(&artifact.to_bytes()?).map_err(stdout_err)?;
            }
            lock.flush().map_err(stdout_err)?;
        }
    }
    Ok(())
}
