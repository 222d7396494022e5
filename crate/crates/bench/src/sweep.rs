//! Monte-Carlo sweeps over sparsity and SNR.
//!
//! A sweep is a grid of `(snr, K)` points with `trials` independent trials
//! each. Every trial draws one instance from a seed derived from
//! `(master_seed, K, snr, trial)` and runs every configured solver on it, so
//! curves are paired and independent of execution order.

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use jsgomp::seed::derive_seed;
use jsgomp::{
    gomp, js_gomp, omp, score_trial, HaltReason, HaltTol, ProblemInstance, PursuitConfig,
    PursuitResult, TrialMetrics,
};
use rayon::prelude::*;

use crate::config::{Algorithm, ExperimentConfig};
use crate::error::BenchError;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub n_atoms: usize,
    pub k: usize,
    /// SNR as configured (dB, or a power ratio with `snr_linear`).
    pub snr: f64,
    pub snr_db: f64,
    pub trial: usize,
    pub seed: u64,
    pub metrics: TrialMetrics,
    pub iterations: usize,
    pub halt_reason: HaltReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub algorithm: Algorithm,
    pub n_atoms: usize,
    pub k: usize,
    pub snr: f64,
    pub snr_db: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_frequency: f64,
    pub mean_psnr_db: f64,
    pub std_psnr_db: f64,
    pub mean_atom_count: f64,
    pub std_atom_count: f64,
    pub mean_relative_l2_error: f64,
    pub mean_runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub raw: Vec<TrialRecord>,
    pub aggregate: Vec<AggregateRow>,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 || !mean.is_finite() {
        return (mean, f64::NAN);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

impl ResultTable {
    /// Aggregates raw rows per `(snr, K, algorithm, N)`, keeping the order in
    /// which the keys first appear.
    pub fn from_raw(raw: Vec<TrialRecord>) -> Self {
        let mut order: Vec<(u64, usize, Algorithm, usize)> = Vec::new();
        let mut groups: BTreeMap<(u64, usize, Algorithm, usize), Vec<&TrialRecord>> = BTreeMap::new();
        for r in &raw {
            let key = (r.snr.to_bits(), r.k, r.algorithm, r.n_atoms);
            groups
                .entry(key)
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(r);
        }
        let aggregate = order
            .iter()
            .map(|key| {
                let rows = &groups[key];
                let first = rows[0];
                let successes = rows.iter().filter(|r| r.metrics.exact_recovery).count();
                let (mean_psnr_db, std_psnr_db) = mean_std(rows.iter().map(|r| r.metrics.psnr_db));
                let (mean_atom_count, std_atom_count) =
                    mean_std(rows.iter().map(|r| r.metrics.atom_count as f64));
                let (mean_relative_l2_error, _) = mean_std(rows.iter().map(|r| r.metrics.relative_l2_error));
                let (mean_runtime_seconds, _) = mean_std(rows.iter().map(|r| r.metrics.runtime_seconds));
                AggregateRow {
                    algorithm: first.algorithm,
                    n_atoms: first.n_atoms,
                    k: first.k,
                    snr: first.snr,
                    snr_db: first.snr_db,
                    trials: rows.len(),
                    successes,
                    success_frequency: successes as f64 / rows.len() as f64,
                    mean_psnr_db,
                    std_psnr_db,
                    mean_atom_count,
                    std_atom_count,
                    mean_relative_l2_error,
                    mean_runtime_seconds,
                }
            })
            .collect();
        Self { raw, aggregate }
    }

    pub fn find(&self, algorithm: Algorithm, n_atoms: usize, k: usize, snr: f64) -> Option<&AggregateRow> {
        self.aggregate.iter().find(|r| {
            r.algorithm == algorithm && r.n_atoms == n_atoms && r.k == k && r.snr.to_bits() == snr.to_bits()
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; 0 picks the number of available cores.
    pub jobs: usize,
    pub progress: bool,
}

pub fn trial_seed(master: u64, k: usize, snr: f64, trial: usize) -> u64 {
    derive_seed(master, &[k as u64, snr.to_bits(), trial as u64])
}

/// Solver configuration for one `(algorithm, N, K)` combination.
pub fn pursuit_config(cfg: &ExperimentConfig, n_atoms: usize, k: usize) -> PursuitConfig<f64> {
    PursuitConfig::new(n_atoms, k)
        .with_halt_tol(HaltTol::Relative(cfg.halt_tol_rel))
        .with_js(cfg.js.into())
}

/// `(algorithm, N)` pairs that are valid at sparsity `k`.
pub fn plan_for(cfg: &ExperimentConfig, k: usize) -> Vec<(Algorithm, usize)> {
    cfg.algorithms
        .iter()
        .flat_map(|a| a.n.iter().map(move |&n| (a.name, n)))
        .filter(|&(_, n)| pursuit_config(cfg, n, k).validate(cfg.m).is_ok())
        .collect()
}

/// Runs `algorithm` on an instance. OMP and gOMP see the ensemble mean (or
/// its first column with `baseline_single_column`), JS-gOMP the ensemble.
pub fn solve(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    n_atoms: usize,
    inst: &ProblemInstance<f64>,
) -> Result<PursuitResult<f64>, BenchError> {
    let pc = pursuit_config(cfg, n_atoms, inst.x.sparsity());
    let baseline = || {
        if cfg.baseline_single_column {
            inst.ens.y.col(0).to_vec()
        } else {
            inst.ens.mean()
        }
    };
    let res = match algorithm {
        Algorithm::Omp => omp(&inst.phi, &baseline(), &pc),
        Algorithm::Gomp => gomp(&inst.phi, &baseline(), &pc),
        Algorithm::JsGomp => js_gomp(&inst.phi, &inst.ens, &pc),
    };
    res.map_err(|e| BenchError::Solver(format!("{algorithm} N={n_atoms}: {e}")))
}

pub fn generate_instance(cfg: &ExperimentConfig, k: usize, snr: f64, seed: u64) -> Result<ProblemInstance<f64>, BenchError> {
    ProblemInstance::generate(cfg.m, cfg.n, k, cfg.p, cfg.snr_db(snr), seed)
        .map_err(|e| BenchError::Solver(format!("instance generation: {e}")))
}

fn run_trial(
    cfg: &ExperimentConfig,
    plan: &[(Algorithm, usize)],
    snr: f64,
    k: usize,
    trial: usize,
) -> Result<Vec<TrialRecord>, BenchError> {
    let seed = trial_seed(cfg.master_seed, k, snr, trial);
    let inst = generate_instance(cfg, k, snr, seed)?;
    let snr_db = cfg.snr_db(snr);
    let tol = cfg.recovery_tol_for(snr_db);
    plan.iter()
        .map(|&(algorithm, n_atoms)| {
            let start = Instant::now();
            let res = solve(cfg, algorithm, n_atoms, &inst)?;
            let elapsed = start.elapsed().as_secs_f64();
            let mut metrics = score_trial(&inst.x, &res, tol)
                .map_err(|e| BenchError::Solver(e.to_string()))?;
            metrics.runtime_seconds = elapsed;
            Ok(TrialRecord {
                algorithm,
                n_atoms,
                k,
                snr,
                snr_db,
                trial,
                seed,
                metrics,
                iterations: res.iterations,
                halt_reason: res.halt_reason,
            })
        })
        .collect()
}

fn run_grid(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ResultTable, BenchError> {
    cfg.validate()?;
    let mut warned = HashSet::new();
    let mut points = Vec::new();
    for &snr in &cfg.snr {
        for &k in &cfg.k_grid {
            let plan = plan_for(cfg, k);
            for a in &cfg.algorithms {
                for &n in &a.n {
                    if !plan.contains(&(a.name, n)) && warned.insert((a.name, n, k)) {
                        log::warn!(
                            "skipping {} N={n} at K={k}: requires N <= min(K, m/K) with m={}",
                            a.name,
                            cfg.m
                        );
                    }
                }
            }
            points.push((snr, k, plan));
        }
    }
    let items: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();

    let total = items.len();
    let done = AtomicUsize::new(0);
    let step = (total / 10).max(1);
    let work = || {
        items
            .par_iter()
            .map(|&(p, t)| {
                let (snr, k, plan) = &points[p];
                let rows = run_trial(cfg, plan, *snr, *k, t);
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                if opts.progress && (finished % step == 0 || finished == total) {
                    log::info!("{finished}/{total} trials done");
                }
                rows
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| BenchError::config("jobs", e.to_string()))?;
    let per_trial = pool.install(work)?;
    Ok(ResultTable::from_raw(per_trial.into_iter().flatten().collect()))
}

/// Recovery statistics as a function of `K` at a single SNR.
pub fn run_sparsity_sweep(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ResultTable, BenchError> {
    if cfg.snr.len() != 1 {
        return Err(BenchError::config("snr", "sweep-k takes exactly one SNR value"));
    }
    run_grid(cfg, opts)
}

/// Recovery statistics as a function of SNR at a single `K`.
pub fn run_snr_sweep(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ResultTable, BenchError> {
    if cfg.k_grid.len() != 1 {
        return Err(BenchError::config("K_grid", "sweep-snr takes exactly one K value"));
    }
    run_grid(cfg, opts)
}
