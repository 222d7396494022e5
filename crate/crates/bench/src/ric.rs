//! Restricted-isometry probes and gOMP recovery-condition tables.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use jsgomp::seed::{rng_from_seed, Rng};
use jsgomp::{
    check_gomp_condition, estimate_ric, gen_sensing_matrix, gomp_condition_threshold, AnalysisError,
    RicMethod, SensingMatrix,
};
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::BenchError;
use crate::output::ser_f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict {
    #[serde(rename = "N")]
    pub n_atoms: usize,
    /// `δ_{K+N}`, absent when `K + N > n`.
    pub delta_k_plus_n: Option<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub threshold: f64,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub method: RicMethod,
    pub supports_checked: usize,
    #[serde(serialize_with = "ser_f64")]
    pub delta_lower: f64,
    pub conditions: Vec<ConditionVerdict>,
}

fn analysis_err(e: AnalysisError) -> BenchError {
    match e {
        AnalysisError::EnumerationTooLarge { .. } => BenchError::config("K_max", e.to_string()),
        other => BenchError::Solver(other.to_string()),
    }
}

/// `δ_K` for `K = 1..=k_max` together with, for each `N`, whether
/// `δ_{K+N} < √N/(√K+√N)`.
pub fn ric_table(
    phi: &SensingMatrix<f64>,
    k_max: usize,
    n_values: &[usize],
    method: RicMethod,
    budget: usize,
    rng: &mut Rng,
) -> Result<Vec<RicRow>, BenchError> {
    let n = phi.cols();
    if k_max == 0 || k_max > n {
        return Err(BenchError::config("K_max", format!("must be in 1..={n}")));
    }
    if n_values.contains(&0) {
        return Err(BenchError::config("N", "must be at least 1"));
    }
    let top = (k_max + n_values.iter().copied().max().unwrap_or(0)).min(n);
    let mut deltas = BTreeMap::new();
    for order in 1..=top {
        deltas.insert(order, estimate_ric(phi, order, method, budget, rng).map_err(analysis_err)?);
    }
    Ok((1..=k_max)
        .map(|k| {
            let est = &deltas[&k];
            let conditions = n_values
                .iter()
                .map(|&na| {
                    let delta = deltas.get(&(k + na)).map(|e| e.delta_lower);
                    ConditionVerdict {
                        n_atoms: na,
                        delta_k_plus_n: delta,
                        threshold: gomp_condition_threshold(k, na),
                        holds: delta.map(|d| check_gomp_condition(d, k, na)),
                    }
                })
                .collect();
            RicRow {
                k,
                method: est.method,
                supports_checked: est.supports_checked,
                delta_lower: est.delta_lower,
                conditions,
            }
        })
        .collect())
}

/// Draws an `m × n` Gaussian matrix from `seed` and tabulates its RIC.
pub fn probe_ric(
    m: usize,
    n: usize,
    k_max: usize,
    n_values: &[usize],
    method: RicMethod,
    budget: usize,
    seed: u64,
) -> Result<Vec<RicRow>, BenchError> {
    let mut rng = rng_from_seed(seed);
    let phi = gen_sensing_matrix(m, n, &mut rng).map_err(|e| BenchError::config("m", e.to_string()))?;
    ric_table(&phi, k_max, n_values, method, budget, &mut rng)
}

fn method_str(m: RicMethod) -> &'static str {
    match m {
        RicMethod::Exhaustive => "exhaustive",
        RicMethod::RandomSupports => "random_supports",
    }
}

/// Writes `ric.{csv,json}`. The CSV has one `cond_n{N}` column per `N`
/// holding `true`, `false`, or `na` when `K + N` exceeds `n`.
pub fn write_ric(rows: &[RicRow], dir: &Path, format: OutputFormat) -> Result<PathBuf, BenchError> {
    if format == OutputFormat::Json {
        return crate::output::write_rows(dir, "ric", format, rows);
    }
    let path = dir.join("ric.csv");
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_of(&path, e))?;
    let mut header = vec!["K".to_string(), "method".into(), "supports_checked".into(), "delta_lower".into()];
    if let Some(first) = rows.first() {
        header.extend(first.conditions.iter().map(|c| format!("cond_n{}", c.n_atoms)));
    }
    w.write_record(&header).map_err(|e| io_of(&path, e))?;
    for r in rows {
        let mut rec = vec![
            r.k.to_string(),
            method_str(r.method).to_string(),
            r.supports_checked.to_string(),
            crate::output::fmt_f64(r.delta_lower),
        ];
        rec.extend(r.conditions.iter().map(|c| match c.holds {
            Some(b) => b.to_string(),
            None => "na".to_string(),
        }));
        w.write_record(&rec).map_err(|e| io_of(&path, e))?;
    }
    w.flush().map_err(|e| BenchError::io(&path, e))?;
    Ok(path)
}

fn io_of(path: &Path, e: csv::Error) -> BenchError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => BenchError::io(path, e),
        other => BenchError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}
