//! CSV / JSON writers.
//!
//! Everything except runtimes is a deterministic function of the
//! configuration, so runtimes go to separate `timing*` files and the
//! `raw`/`aggregate` files can be compared byte for byte across runs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};

use crate::config::OutputFormat;
use crate::error::BenchError;
use crate::sweep::{AggregateRow, ResultTable, TrialRecord};

/// Shortest round-trip representation; non-finite values as `inf`, `-inf`,
/// `nan`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

/// Writes finite reals as numbers and the rest as strings, which keeps JSON
/// valid and CSV readable.
pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&fmt_f64(*v))
    }
}

fn ser_opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_f64(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct RawRow {
    algorithm: &'static str,
    #[serde(rename = "N")]
    n_atoms: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(serialize_with = "ser_f64")]
    snr: f64,
    #[serde(serialize_with = "ser_f64")]
    snr_db: f64,
    trial: usize,
    seed: u64,
    exact_recovery: u8,
    #[serde(serialize_with = "ser_f64")]
    support_recall: f64,
    #[serde(serialize_with = "ser_f64")]
    relative_l2_error: f64,
    #[serde(serialize_with = "ser_f64")]
    psnr_db: f64,
    atom_count: usize,
    iterations: usize,
    halt_reason: &'static str,
}

impl From<&TrialRecord> for RawRow {
    fn from(r: &TrialRecord) -> Self {
        Self {
            algorithm: r.algorithm.as_str(),
            n_atoms: r.n_atoms,
            k: r.k,
            snr: r.snr,
            snr_db: r.snr_db,
            trial: r.trial,
            seed: r.seed,
            exact_recovery: r.metrics.exact_recovery as u8,
            support_recall: r.metrics.support_recall,
            relative_l2_error: r.metrics.relative_l2_error,
            psnr_db: r.metrics.psnr_db,
            atom_count: r.metrics.atom_count,
            iterations: r.iterations,
            halt_reason: r.halt_reason.as_str(),
        }
    }
}

#[derive(Serialize)]
struct RawTimingRow {
    algorithm: &'static str,
    #[serde(rename = "N")]
    n_atoms: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(serialize_with = "ser_f64")]
    snr: f64,
    trial: usize,
    #[serde(serialize_with = "ser_f64")]
    runtime_seconds: f64,
}

#[derive(Serialize)]
struct AggRow {
    algorithm: &'static str,
    #[serde(rename = "N")]
    n_atoms: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(serialize_with = "ser_f64")]
    snr: f64,
    #[serde(serialize_with = "ser_f64")]
    snr_db: f64,
    trials: usize,
    successes: usize,
    #[serde(serialize_with = "ser_f64")]
    success_frequency: f64,
    #[serde(serialize_with = "ser_f64")]
    mean_psnr_db: f64,
    #[serde(serialize_with = "ser_f64")]
    std_psnr_db: f64,
    #[serde(serialize_with = "ser_f64")]
    mean_atom_count: f64,
    #[serde(serialize_with = "ser_f64")]
    std_atom_count: f64,
    #[serde(serialize_with = "ser_f64")]
    mean_relative_l2_error: f64,
}

impl From<&AggregateRow> for AggRow {
    fn from(r: &AggregateRow) -> Self {
        Self {
            algorithm: r.algorithm.as_str(),
            n_atoms: r.n_atoms,
            k: r.k,
            snr: r.snr,
            snr_db: r.snr_db,
            trials: r.trials,
            successes: r.successes,
            success_frequency: r.success_frequency,
            mean_psnr_db: r.mean_psnr_db,
            std_psnr_db: r.std_psnr_db,
            mean_atom_count: r.mean_atom_count,
            std_atom_count: r.std_atom_count,
            mean_relative_l2_error: r.mean_relative_l2_error,
        }
    }
}

#[derive(Serialize)]
struct AggTimingRow {
    algorithm: &'static str,
    #[serde(rename = "N")]
    n_atoms: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(serialize_with = "ser_f64")]
    snr: f64,
    trials: usize,
    #[serde(serialize_with = "ser_f64")]
    mean_runtime_seconds: f64,
}

/// One row of an error-trace dump. Algorithms that were not run are left
/// out of the file.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub index: usize,
    #[serde(serialize_with = "ser_f64")]
    pub x_actual: f64,
    #[serde(serialize_with = "ser_opt_f64", skip_serializing_if = "Option::is_none")]
    pub x_recon_omp: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64", skip_serializing_if = "Option::is_none")]
    pub x_recon_gomp: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64", skip_serializing_if = "Option::is_none")]
    pub x_recon_jsgomp: Option<f64>,
}

fn create(path: &Path) -> Result<BufWriter<File>, BenchError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| BenchError::io(path, e))
}

/// Writes `rows` to `dir/stem.{csv,json}` and returns the path.
pub fn write_rows<R: Serialize>(
    dir: &Path,
    stem: &str,
    format: OutputFormat,
    rows: &[R],
) -> Result<PathBuf, BenchError> {
    let path = dir.join(match format {
        OutputFormat::Csv => format!("{stem}.csv"),
        OutputFormat::Json => format!("{stem}.json"),
    });
    let mut out = create(&path)?;
    let io_err = |e: std::io::Error| BenchError::io(&path, e);
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for row in rows {
                w.serialize(row).map_err(|e| match e.into_kind() {
                    csv::ErrorKind::Io(e) => io_err(e),
                    other => io_err(std::io::Error::other(format!("{other:?}"))),
                })?;
            }
            w.flush().map_err(io_err)?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| io_err(e.into()))?;
            out.write_all(b"\n").map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)?;
    Ok(path)
}

/// Writes `raw`, `aggregate`, `timing_raw` and `timing` tables.
pub fn write_table(table: &ResultTable, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>, BenchError> {
    let raw: Vec<RawRow> = table.raw.iter().map(RawRow::from).collect();
    let agg: Vec<AggRow> = table.aggregate.iter().map(AggRow::from).collect();
    let raw_timing: Vec<RawTimingRow> = table
        .raw
        .iter()
        .map(|r| RawTimingRow {
            algorithm: r.algorithm.as_str(),
            n_atoms: r.n_atoms,
            k: r.k,
            snr: r.snr,
            trial: r.trial,
            runtime_seconds: r.metrics.runtime_seconds,
        })
        .collect();
    let agg_timing: Vec<AggTimingRow> = table
        .aggregate
        .iter()
        .map(|r| AggTimingRow {
            algorithm: r.algorithm.as_str(),
            n_atoms: r.n_atoms,
            k: r.k,
            snr: r.snr,
            trials: r.trials,
            mean_runtime_seconds: r.mean_runtime_seconds,
        })
        .collect();
    Ok(vec![
        write_rows(dir, "raw", format, &raw)?,
        write_rows(dir, "aggregate", format, &agg)?,
        write_rows(dir, "timing_raw", format, &raw_timing)?,
        write_rows(dir, "timing", format, &agg_timing)?,
    ])
}
