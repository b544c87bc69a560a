//! Monte Carlo harness for the noisy sorting and search algorithms.
//!
//! A [`BenchConfig`] names an algorithm and instance; [`run_trials`] runs it
//! on independent seeded oracles, possibly in parallel, and folds the
//! [`TrialReport`]s into an [`Aggregate`]. Results depend only on the config,
//! never on thread count or scheduling.

mod config;
mod output;
mod run;

use std::io;

use thiserror::Error;

pub use config::{Algorithm, BenchConfig};
pub use output::{emit, emit_to_writer, read_csv, report_constants, Format, CSV_HEADER};
pub use run::{
    aggregate, normalizer, run_trial, run_trials, trial_seed, wilson_interval, Aggregate, AggregateRow, TrialReport,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Domain(#[from] noisysort::NoisyError),

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    fn from_io(path: &str) -> impl FnOnce(io::Error) -> BenchError + '_ {
        move |source| BenchError::Io {
            path: path.to_string(),
            source,
        }
    }

    /// 2 for usage and domain errors, 1 for everything touching files.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::InvalidConfig(_) | BenchError::Domain(_) => 2,
            _ => 1,
        }
    }
}
