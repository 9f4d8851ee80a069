//! Campaign execution: every (grid point, trial) pair on a worker pool, with
//! results collected in grid order.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::output::{summarize, summary_path, write_summary, write_trials, TrialRow};
use crate::trial::{run_trial, TrialRecord};
use crate::HarnessError;

/// Runs all trials. `jobs` caps the worker count (default: all cores). The
/// record order is the grid order of [`ExperimentConfig::points`], then the
/// trial index, whatever the scheduling.
pub fn run_campaign(config: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<TrialRecord>, HarnessError> {
    config.validate()?;
    let work: Vec<_> = config
        .points()
        .into_iter()
        .flat_map(|p| (0..config.trials).map(move |t| (p, t)))
        .collect();
    let run = || work.par_iter().map(|(p, t)| run_trial(config, p, *t)).collect();
    match jobs {
        Some(0) => Err(HarnessError::Config("jobs must be >= 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Pool(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Runs the campaign and writes `out` plus `<out>.summary.csv`.
pub fn run_to_files(config: &ExperimentConfig, out: &Path, jobs: Option<usize>) -> Result<Vec<TrialRecord>, HarnessError> {
    let records = run_campaign(config, jobs)?;
    let file = File::create(out).map_err(|e| HarnessError::io(out, e))?;
    write_trials(BufWriter::new(file), &records)?;
    let rows: Vec<TrialRow> = records.iter().map(TrialRow::from).collect();
    let summary = summarize(&rows)?;
    let spath = summary_path(out);
    let file = File::create(&spath).map_err(|e| HarnessError::io(&spath, e))?;
    write_summary(BufWriter::new(file), &summary)?;
    Ok(records)
}
