//! Campaign configuration: a flat TOML file.
//!
//! ```toml
//! algorithms = ["gcma", "hgcma:linear", "adaptive-hgcma:two"]
//! m = [5]
//! n = [7]
//! k = [20, 100]          # block lengths (batch algorithms)
//! snr_db = [10.0, 20.0]  # `inf` for noiseless
//! constellation = "psk8" # or "qam16"
//! sweeps = 10
//! trials = 100
//! seed = 1
//! window = 10            # adaptive window length K
//! steps = 1000           # adaptive stream length
//! lscma_iters = 50
//! out = "results.csv"    # optional, the CLI --out wins
//! ```
//!
//! Every list key also accepts a single scalar.

use std::path::{Path, PathBuf};

use hgcma::signal::Constellation;
use serde::Deserialize;

use crate::algorithm::Algorithm;
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub snr_db: Vec<f64>,
    pub constellation: Constellation,
    pub sweeps: usize,
    pub trials: usize,
    pub seed: u64,
    pub window: usize,
    pub steps: usize,
    pub lscma_iters: usize,
    pub out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    algorithms: OneOrMany<String>,
    m: OneOrMany<usize>,
    n: OneOrMany<usize>,
    #[serde(default)]
    k: Option<OneOrMany<usize>>,
    snr_db: OneOrMany<f64>,
    #[serde(default)]
    constellation: Option<String>,
    #[serde(default = "default_sweeps")]
    sweeps: usize,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_window")]
    window: usize,
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_lscma_iters")]
    lscma_iters: usize,
    #[serde(default)]
    out: Option<PathBuf>,
}

fn default_sweeps() -> usize {
    10
}

fn default_trials() -> usize {
    100
}

fn default_window() -> usize {
    10
}

fn default_steps() -> usize {
    1000
}

fn default_lscma_iters() -> usize {
    50
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.message().to_string()))?;
        let algorithms = Vec::from(raw.algorithms)
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Algorithm>, _>>()?;
        let constellation = match raw.constellation {
            Some(c) => c.parse().map_err(|_| HarnessError::Config(format!("unknown constellation {c:?}")))?,
            None => Constellation::default(),
        };
        let config = Self {
            algorithms,
            m: raw.m.into(),
            n: raw.n.into(),
            k: raw.k.map(Vec::from).unwrap_or_default(),
            snr_db: raw.snr_db.into(),
            constellation,
            sweeps: raw.sweeps,
            trials: raw.trials,
            seed: raw.seed,
            window: raw.window,
            steps: raw.steps,
            lscma_iters: raw.lscma_iters,
            out: raw.out,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn has_batch(&self) -> bool {
        self.algorithms.iter().any(|a| !a.is_adaptive())
    }

    fn has_adaptive(&self) -> bool {
        self.algorithms.iter().any(|a| a.is_adaptive())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: &str| Err(HarnessError::Config(msg.to_string()));
        if self.algorithms.is_empty() || self.m.is_empty() || self.n.is_empty() || self.snr_db.is_empty() {
            return fail("algorithms, m, n and snr_db must be nonempty");
        }
        if self.has_batch() && self.k.is_empty() {
            return fail("k must be nonempty when batch algorithms are listed");
        }
        if self.trials == 0 || self.sweeps == 0 {
            return fail("trials and sweeps must be >= 1");
        }
        if self.m.iter().any(|&m| m < 2) {
            return fail("every m must be >= 2");
        }
        let max_m = self.m.iter().max().copied().unwrap_or(0);
        let min_n = self.n.iter().min().copied().unwrap_or(0);
        if min_n < max_m {
            return fail("every n must be >= every m");
        }
        if self.k.contains(&0) {
            return fail("every k must be >= 1");
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return fail("snr_db values must not be NaN");
        }
        if self.has_adaptive() && (self.window < 2 || self.steps <= self.window) {
            return fail("adaptive runs need window >= 2 and steps > window");
        }
        Ok(())
    }

    /// Grid points in output order: algorithm, M, N, K, SNR. Adaptive
    /// algorithms take `K = window` instead of the `k` list.
    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for &algorithm in &self.algorithms {
            let ks = if algorithm.is_adaptive() { vec![self.window] } else { self.k.clone() };
            for &m in &self.m {
                for &n in &self.n {
                    for &k in &ks {
                        for &snr_db in &self.snr_db {
                            out.push(Point { algorithm, m, n, k, snr_db });
                        }
                    }
                }
            }
        }
        out
    }
}

/// One cell of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
}
