//! Experiment harness for single-qubit adaptive tomography.
//!
//! The estimators and protocols live in [`qubit_tomo_core`]; this crate runs
//! them as parallel Monte Carlo sweeps, runs the named figure experiments and
//! handles the CSV/JSON/config formats used by the `qubit-tomo` binary.

pub mod config;
pub mod io;
pub mod plot;
pub mod predict;
pub mod reproduce;
pub mod states;
pub mod sweep;

pub use qubit_tomo_core as core;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "QUBIT_TOMO_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] qubit_tomo_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
    #[error("{rows} row(s) exceed the non-convergence limit")]
    NonConvergence { rows: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status: 2 for bad input, 3 for non-convergence, 1 for
    /// I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::NonConvergence { .. } => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

/// Worker count from [`WORKERS_ENV`], else the number of available CPUs.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Error::Invalid("x".into()).exit_code(), 2);
        assert_eq!(Error::NonConvergence { rows: 1 }.exit_code(), 3);
        assert_eq!(Error::Core(qubit_tomo_core::Error::UnsupportedProtocol).exit_code(), 2);
        assert_eq!(Error::Io(std::io::Error::other("disk")).exit_code(), 1);
        let toml_err = toml::from_str::<toml::Value>("= 1").unwrap_err();
        assert_eq!(Error::from(toml_err).exit_code(), 2);
    }
}
