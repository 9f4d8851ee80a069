//! `hgcma-sim`: run Monte Carlo campaigns from a TOML config and summarize
//! their CSV output.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hgcma_harness::output::{read_trials, summarize, summary_path, write_summary};
use hgcma_harness::{run_to_files, ExperimentConfig};

#[derive(Parser)]
#[command(name = "hgcma-sim", version, about = "Monte Carlo campaigns for CM blind source separation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write per-trial rows plus `<out>.summary.csv`.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (overrides `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Override the number of trials per grid point.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recompute per-point summaries from a trial CSV.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            jobs,
            trials,
            seed,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out = out
                .or_else(|| cfg.out.clone())
                .context("no output path: pass --out or set `out` in the config")?;
            let records = run_to_files(&cfg, &out, jobs)?;
            let failed = records.iter().filter(|r| r.outcome.is_err()).count();
            eprintln!(
                "wrote {} trials ({failed} failed) to {} and {}",
                records.len(),
                out.display(),
                summary_path(&out).display()
            );
        }
        Command::Summarize { input, out } => {
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let rows = read_trials(file).with_context(|| format!("reading {}", input.display()))?;
            let summary = summarize(&rows)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_summary(BufWriter::new(file), &summary)?;
        }
    }
    Ok(())
}
