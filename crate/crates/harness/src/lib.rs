//! Monte Carlo campaigns for the `hgcma` separators: configuration, trial
//! execution, CSV output and summaries. The `hgcma-sim` binary wraps this
//! crate.

pub mod algorithm;
pub mod campaign;
pub mod config;
pub mod output;
pub mod trial;

use std::path::Path;

pub use algorithm::Algorithm;
pub use campaign::{run_campaign, run_to_files};
pub use config::{ExperimentConfig, Point};
pub use trial::{adaptive_sinr_trace, run_trial, trial_seed, TrialMetrics, TrialRecord};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("csv error: {0}")]
    Csv(String),
    #[error("thread pool error: {0}")]
    Pool(String),
}

impl HarnessError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
