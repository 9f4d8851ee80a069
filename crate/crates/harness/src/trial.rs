//! A single Monte Carlo trial: scenario generation, separation and scoring.

use std::time::Instant;

use hgcma::adaptive::{adaptive_init, RotationStrategy};
use hgcma::separators::{run_gcma, run_hgcma, run_lscma, SeparatorConfig, SeparatorState};
use hgcma::signal::{cm_cost, observe, resolve_ambiguity, ser, sinr, to_db, ChannelScenario};
use hgcma::whitening::fit_whitener;
use hgcma::{ComplexBlock, Error as CoreError};

use crate::algorithm::Algorithm;
use crate::config::{ExperimentConfig, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    /// Mean per-output SINR, in dB.
    pub sinr_db: f64,
    pub per_output_db: Vec<f64>,
    pub ser: f64,
    pub final_cost: f64,
    pub rotations: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub point: Point,
    pub trial: usize,
    pub seed: u64,
    /// Metrics, or the error code of a failed trial.
    pub outcome: Result<TrialMetrics, String>,
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `base ^ hash(M, N, K, SNR, trial)`. The algorithm is left out, so every
/// algorithm at a grid point sees the same channels, sources and noise.
pub fn trial_seed(base: u64, point: &Point, trial: usize) -> u64 {
    let fields = [point.m as u64, point.n as u64, point.k as u64, point.snr_db.to_bits(), trial as u64];
    base ^ fields.iter().fold(0, |h, &v| splitmix64(h ^ v))
}

/// Scenario of a trial: `K` samples for batch points, `steps` for adaptive ones.
pub fn trial_scenario(config: &ExperimentConfig, point: &Point, trial: usize) -> Result<ChannelScenario, CoreError> {
    let len = if point.algorithm.is_adaptive() { config.steps } else { point.k };
    ChannelScenario::generate(
        point.m,
        point.n,
        len,
        point.snr_db,
        config.constellation,
        trial_seed(config.seed, point, trial),
    )
}

/// Result of running the adaptive tracker over a whole stream.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRun {
    /// Overall `M x N` separator (tracker state times the fixed whitener).
    pub w: ComplexBlock,
    /// Mean SINR in dB after each post-warm-up step (`steps - K` entries),
    /// when requested.
    pub sinr_trace_db: Vec<f64>,
    pub window_cost: f64,
    pub rotations: usize,
}

/// Feeds the columns of `y` to an adaptive tracker with window `k`. When
/// `N > M` the samples first go through a whitener fitted on the first `k`
/// samples and kept fixed.
pub fn run_adaptive(
    y: &ComplexBlock,
    scenario: &ChannelScenario,
    k: usize,
    strategy: RotationStrategy,
    trace: bool,
) -> Result<AdaptiveRun, CoreError> {
    let (n, len) = y.shape();
    let m = scenario.m;
    let front = if n > m {
        let head = ComplexBlock::from_fn(n, k.min(len), |i, j| y[(i, j)]);
        Some(fit_whitener(&head, m)?.b)
    } else {
        None
    };
    let mut state = adaptive_init(m, k, strategy, None)?;
    let mut sinr_trace_db = Vec::new();
    let mut last_cost = 0.0;
    for t in 0..len {
        let raw = y.column(t);
        let x = match &front {
            Some(b) => b.mul_vec(&raw)?,
            None => raw,
        };
        let out = state.step(&x)?;
        last_cost = out.window_cost;
        if trace && state.time() > k {
            let w = overall(state.w(), front.as_ref())?;
            sinr_trace_db.push(to_db(sinr(&w, &scenario.a, scenario.noise_var)?.average));
        }
    }
    Ok(AdaptiveRun {
        w: overall(state.w(), front.as_ref())?,
        sinr_trace_db,
        window_cost: last_cost,
        rotations: state.rotations(),
    })
}

fn overall(w: &ComplexBlock, front: Option<&ComplexBlock>) -> Result<ComplexBlock, CoreError> {
    match front {
        Some(b) => w.matmul(b),
        None => Ok(w.clone()),
    }
}

fn batch(config: &ExperimentConfig, algorithm: Algorithm, y: &ComplexBlock, m: usize) -> Result<SeparatorState, CoreError> {
    let sep = SeparatorConfig::default().with_sweeps(config.sweeps);
    match algorithm {
        Algorithm::Gcma => run_gcma(y, m, &sep),
        Algorithm::Hgcma(v) => run_hgcma(y, m, &sep.with_shear(v)),
        Algorithm::Lscma => run_lscma(y, m, config.lscma_iters),
        Algorithm::AdaptiveHgcma(_) => unreachable!("adaptive algorithms are not batch separators"),
    }
}

fn score(
    w: &ComplexBlock,
    scenario: &ChannelScenario,
    y: &ComplexBlock,
    s: &ComplexBlock,
) -> Result<(f64, Vec<f64>, f64), CoreError> {
    let report = sinr(w, &scenario.a, scenario.noise_var)?;
    let z = w.matmul(y)?;
    let (_, aligned) = resolve_ambiguity(&z, s)?;
    let symbol_errors = ser(&aligned, s, scenario.constellation)?;
    Ok((
        to_db(report.average),
        report.per_output.iter().map(|&x| to_db(x)).collect(),
        symbol_errors,
    ))
}

fn metrics(config: &ExperimentConfig, point: &Point, trial: usize) -> Result<TrialMetrics, CoreError> {
    let scenario = trial_scenario(config, point, trial)?;
    let s = scenario.sources()?;
    let y = observe(&scenario, &s)?;
    let start = Instant::now();
    let (w, final_cost, rotations) = match point.algorithm {
        Algorithm::AdaptiveHgcma(strategy) => {
            let run = run_adaptive(&y, &scenario, point.k, strategy, false)?;
            (run.w, run.window_cost, run.rotations)
        }
        algorithm => {
            let st = batch(config, algorithm, &y, point.m)?;
            let cost = cm_cost(&st.work);
            (st.w, cost, st.rotations)
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let (sinr_db, per_output_db, ser) = score(&w, &scenario, &y, &s)?;
    Ok(TrialMetrics {
        sinr_db,
        per_output_db,
        ser,
        final_cost,
        rotations,
        wall_ms,
    })
}

/// Runs one trial. Library errors become failed-trial records.
///
/// SER uses the final separator on the whole observed block; for adaptive
/// runs SINR is that of the final separator (steady state).
pub fn run_trial(config: &ExperimentConfig, point: &Point, trial: usize) -> TrialRecord {
    TrialRecord {
        point: *point,
        trial,
        seed: trial_seed(config.seed, point, trial),
        outcome: metrics(config, point, trial).map_err(|e| e.code().to_string()),
    }
}

/// Per-step SINR trace (dB) of an adaptive trial.
pub fn adaptive_sinr_trace(config: &ExperimentConfig, point: &Point, trial: usize) -> Result<Vec<f64>, CoreError> {
    let Algorithm::AdaptiveHgcma(strategy) = point.algorithm else {
        return Err(CoreError::InvalidInput(format!("{} is not adaptive", point.algorithm)));
    };
    let scenario = trial_scenario(config, point, trial)?;
    let y = observe(&scenario, &scenario.sources()?)?;
    Ok(run_adaptive(&y, &scenario, point.k, strategy, true)?.sinr_trace_db)
}
