//! Per-index reconstruction dumps for a single instance.

use std::path::PathBuf;

use jsgomp::ProblemInstance;

use crate::config::{Algorithm, ExperimentConfig};
use crate::error::BenchError;
use crate::output::{write_rows, TraceRow};
use crate::sweep::{generate_instance, solve};

/// Reconstructions of one instance by every configured algorithm.
#[derive(Debug, Clone)]
pub struct ErrorTrace {
    pub instance: ProblemInstance<f64>,
    pub rows: Vec<TraceRow>,
}

impl ErrorTrace {
    /// `x_recon − x_actual` for one algorithm, if it was run.
    pub fn errors(&self, algorithm: Algorithm) -> Option<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let recon = match algorithm {
                    Algorithm::Omp => r.x_recon_omp,
                    Algorithm::Gomp => r.x_recon_gomp,
                    Algorithm::JsGomp => r.x_recon_jsgomp,
                };
                recon.map(|v| v - r.x_actual)
            })
            .collect()
    }

    /// Root-mean-square of the error trace.
    pub fn rms(&self, algorithm: Algorithm) -> Option<f64> {
        let e = self.errors(algorithm)?;
        Some((e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64).sqrt())
    }
}

/// Resolves the single `(K, SNR)` point and one `N` per algorithm.
fn resolve(cfg: &ExperimentConfig) -> Result<(usize, f64, Vec<(Algorithm, usize)>), BenchError> {
    cfg.validate()?;
    let [k] = cfg.k_grid[..] else {
        return Err(BenchError::config("K_grid", "trace takes exactly one K value"));
    };
    let [snr] = cfg.snr[..] else {
        return Err(BenchError::config("snr", "trace takes exactly one SNR value"));
    };
    let mut plan: Vec<(Algorithm, usize)> = Vec::new();
    for a in &cfg.algorithms {
        let [n] = a.n[..] else {
            return Err(BenchError::config(
                "algorithms",
                format!("trace takes exactly one N for {}", a.name),
            ));
        };
        if plan.iter().any(|(b, _)| *b == a.name) {
            return Err(BenchError::config("algorithms", format!("{} listed twice", a.name)));
        }
        plan.push((a.name, n));
    }
    Ok((k, snr, plan))
}

/// Runs every configured algorithm on the instance drawn from `trial_seed`.
pub fn error_trace(cfg: &ExperimentConfig, trial_seed: u64) -> Result<ErrorTrace, BenchError> {
    let (k, snr, plan) = resolve(cfg)?;
    let instance = generate_instance(cfg, k, snr, trial_seed)?;
    let x = instance.x.to_dense();
    let mut rows: Vec<TraceRow> = x
        .iter()
        .enumerate()
        .map(|(index, &x_actual)| TraceRow {
            index,
            x_actual,
            x_recon_omp: None,
            x_recon_gomp: None,
            x_recon_jsgomp: None,
        })
        .collect();
    for (algorithm, n_atoms) in plan {
        let res = solve(cfg, algorithm, n_atoms, &instance)?;
        for (row, v) in rows.iter_mut().zip(res.x_hat) {
            let slot = match algorithm {
                Algorithm::Omp => &mut row.x_recon_omp,
                Algorithm::Gomp => &mut row.x_recon_gomp,
                Algorithm::JsGomp => &mut row.x_recon_jsgomp,
            };
            *slot = Some(v);
        }
    }
    Ok(ErrorTrace { instance, rows })
}

/// Writes `trace.{csv,json}` into the configured output directory.
pub fn dump_error_trace(cfg: &ExperimentConfig, trial_seed: u64) -> Result<PathBuf, BenchError> {
    let trace = error_trace(cfg, trial_seed)?;
    write_rows(&cfg.output.dir, "trace", cfg.output.format, &trace.rows)
}
