//! CSV output: one row per trial, and per-point summaries.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::trial::TrialRecord;
use crate::HarnessError;

pub const TRIAL_HEADER: [&str; 13] = [
    "algorithm", "variant", "M", "N", "K", "snr_db", "trial", "sinr_db", "ser", "final_cost", "rotations", "wall_ms",
    "error",
];

pub const SUMMARY_HEADER: [&str; 13] = [
    "algorithm", "variant", "M", "N", "K", "snr_db", "trials", "failed", "mean_sinr_db", "se_sinr_db", "mean_ser",
    "se_ser", "mean_wall_ms",
];

/// Formats with 9 significant digits, `%g` style: `inf`, `-inf`, `nan`, no
/// trailing zeros, exponent notation outside `[1e-5, 1e9)`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn parse_float(s: &str) -> Result<f64, HarnessError> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => s.parse().map_err(|_| HarnessError::Csv(format!("bad number {s:?}"))),
    }
}

/// The CSV fields of a trial, in [`TRIAL_HEADER`] order.
pub fn trial_fields(r: &TrialRecord) -> Vec<String> {
    let p = &r.point;
    let mut row = vec![
        p.algorithm.family().to_string(),
        p.algorithm.variant().to_string(),
        p.m.to_string(),
        p.n.to_string(),
        p.k.to_string(),
        fmt_float(p.snr_db),
        r.trial.to_string(),
    ];
    match &r.outcome {
        Ok(m) => row.extend([
            fmt_float(m.sinr_db),
            fmt_float(m.ser),
            fmt_float(m.final_cost),
            m.rotations.to_string(),
            fmt_float(m.wall_ms),
            String::new(),
        ]),
        Err(code) => row.extend([String::new(), String::new(), String::new(), String::new(), String::new(), code.clone()]),
    }
    row
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trials<W: Write>(out: W, records: &[TrialRecord]) -> Result<(), HarnessError> {
    write_rows(out, &TRIAL_HEADER, records.iter().map(trial_fields)).map_err(|e| HarnessError::Csv(e.to_string()))
}

/// A trial row as read back from CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TrialRow {
    pub algorithm: String,
    pub variant: String,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub snr_db: String,
    pub trial: usize,
    pub sinr_db: String,
    pub ser: String,
    pub final_cost: String,
    pub rotations: String,
    pub wall_ms: String,
    pub error: String,
}

impl TrialRow {
    pub fn failed(&self) -> bool {
        !self.error.is_empty()
    }
}

impl From<&TrialRecord> for TrialRow {
    fn from(r: &TrialRecord) -> Self {
        let f = trial_fields(r);
        Self {
            algorithm: f[0].clone(),
            variant: f[1].clone(),
            m: r.point.m,
            n: r.point.n,
            k: r.point.k,
            snr_db: f[5].clone(),
            trial: r.trial,
            sinr_db: f[7].clone(),
            ser: f[8].clone(),
            final_cost: f[9].clone(),
            rotations: f[10].clone(),
            wall_ms: f[11].clone(),
            error: f[12].clone(),
        }
    }
}

pub fn read_trials<R: Read>(input: R) -> Result<Vec<TrialRow>, HarnessError> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| HarnessError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != TRIAL_HEADER {
        return Err(HarnessError::Csv(format!("unexpected header {header:?}")));
    }
    reader
        .deserialize()
        .collect::<Result<Vec<TrialRow>, _>>()
        .map_err(|e| HarnessError::Csv(e.to_string()))
}

/// Aggregates of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub variant: String,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub snr_db: String,
    pub trials: usize,
    pub failed: usize,
    pub mean_sinr_db: f64,
    pub se_sinr_db: f64,
    pub mean_ser: f64,
    pub se_ser: f64,
    pub mean_wall_ms: f64,
}

/// Mean and standard error (`sd / sqrt(n)`, sample standard deviation).
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 || !mean.is_finite() {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Groups rows by grid point (first-appearance order) and averages the
/// successful trials; failed trials are only counted.
pub fn summarize(rows: &[TrialRow]) -> Result<Vec<SummaryRow>, HarnessError> {
    type Key = (String, String, usize, usize, usize, String);
    let mut order: Vec<Key> = Vec::new();
    let mut groups: BTreeMap<Key, Vec<&TrialRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.algorithm.clone(), r.variant.clone(), r.m, r.n, r.k, r.snr_db.clone());
        let entry = groups.entry(key.clone()).or_default();
        if entry.is_empty() {
            order.push(key);
        }
        entry.push(r);
    }
    let mut out = Vec::with_capacity(order.len());
    for key in order {
        let group = &groups[&key];
        let ok: Vec<&&TrialRow> = group.iter().filter(|r| !r.failed()).collect();
        let column = |f: fn(&TrialRow) -> &str| -> Result<Vec<f64>, HarnessError> {
            ok.iter().map(|r| parse_float(f(r))).collect()
        };
        let (mean_sinr_db, se_sinr_db) = mean_se(&column(|r| &r.sinr_db)?);
        let (mean_ser, se_ser) = mean_se(&column(|r| &r.ser)?);
        let (mean_wall_ms, _) = mean_se(&column(|r| &r.wall_ms)?);
        let (algorithm, variant, m, n, k, snr_db) = key;
        out.push(SummaryRow {
            algorithm,
            variant,
            m,
            n,
            k,
            snr_db,
            trials: group.len(),
            failed: group.len() - ok.len(),
            mean_sinr_db,
            se_sinr_db,
            mean_ser,
            se_ser,
            mean_wall_ms,
        });
    }
    Ok(out)
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    let records = rows.iter().map(|r| {
        vec![
            r.algorithm.clone(),
            r.variant.clone(),
            r.m.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.snr_db.clone(),
            r.trials.to_string(),
            r.failed.to_string(),
            fmt_float(r.mean_sinr_db),
            fmt_float(r.se_sinr_db),
            fmt_float(r.mean_ser),
            fmt_float(r.se_ser),
            fmt_float(r.mean_wall_ms),
        ]
    });
    write_rows(out, &SUMMARY_HEADER, records).map_err(|e| HarnessError::Csv(e.to_string()))
}

/// Path of the summary written next to a trial CSV: `<out>.summary.csv`.
pub fn summary_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary.csv");
    name.into()
}
