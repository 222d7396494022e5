//! `verify`: runs the ground-truth oracles on small seeded problems and
//! reports each as a pass/fail check.

use std::path::{Path, PathBuf};

use jsgomp::seed::{derive_seed, rng_from_seed};
use jsgomp::{
    estimate_ric, gomp, l0_oracle, omp, shrinkage_risk, verify_correlation_stats, HaltTol, Matrix,
    ProblemInstance, PursuitConfig, RicMethod, SensingMatrix, VarianceMode,
};
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::BenchError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn solver_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Solver(e.to_string())
}

fn check_l0_oracle(seed: u64) -> Result<Check, BenchError> {
    let (mut worst, mut mismatches) = (0.0f64, 0);
    for t in 0..20u64 {
        let inst = ProblemInstance::<f64>::generate(8, 12, 2, 3, f64::INFINITY, derive_seed(seed, &[1, t]))
            .map_err(solver_err)?;
        let sol = l0_oracle(&inst.phi, &inst.ens.y0, 2).map_err(solver_err)?;
        worst = worst.max(sol.residual_norm);
        if sol.support != inst.x.support() {
            mismatches += 1;
        }
    }
    Ok(Check {
        name: "l0_oracle",
        passed: worst <= 1e-10,
        detail: format!("max residual {worst:e}; {mismatches}/20 supports differ from the planted one"),
    })
}

fn check_omp_equivalence(seed: u64) -> Result<Check, BenchError> {
    let mut differing = 0;
    for t in 0..20u64 {
        let inst = ProblemInstance::<f64>::generate(50, 500, 8, 3, f64::INFINITY, derive_seed(seed, &[2, t]))
            .map_err(solver_err)?;
        let cfg = PursuitConfig::new(1, 8).with_halt_tol(HaltTol::Relative(1e-6));
        let a = omp(&inst.phi, &inst.ens.y0, &cfg).map_err(solver_err)?;
        let b = gomp(&inst.phi, &inst.ens.y0, &cfg).map_err(solver_err)?;
        if a.selection_order != b.selection_order || a.x_hat != b.x_hat {
            differing += 1;
        }
    }
    Ok(Check {
        name: "omp_is_gomp_n1",
        passed: differing == 0,
        detail: format!("{differing}/20 instances differ"),
    })
}

fn check_ric(seed: u64) -> Result<Check, BenchError> {
    let mut rng = rng_from_seed(derive_seed(seed, &[3]));
    let eye: SensingMatrix<f64> = Matrix::identity(8).map_err(solver_err)?.into();
    let d_eye = estimate_ric(&eye, 3, RicMethod::Exhaustive, 0, &mut rng).map_err(solver_err)?.delta_lower;
    let dup: SensingMatrix<f64> = Matrix::from_columns(&[vec![1.0, 0.0], vec![1.0, 0.0]])
        .map_err(solver_err)?
        .into();
    let d_dup = estimate_ric(&dup, 2, RicMethod::Exhaustive, 0, &mut rng).map_err(solver_err)?.delta_lower;
    Ok(Check {
        name: "ric_oracle",
        passed: d_eye == 0.0 && (d_dup - 1.0).abs() <= 1e-12,
        detail: format!("identity delta_3 = {d_eye:e}; duplicated column delta_2 = {d_dup}"),
    })
}

fn check_correlation_stats(seed: u64) -> Result<Check, BenchError> {
    let inst = ProblemInstance::<f64>::generate(50, 500, 5, 5, 4.0, derive_seed(seed, &[4])).map_err(solver_err)?;
    let mut rng = rng_from_seed(derive_seed(seed, &[4, 1]));
    let r = verify_correlation_stats(&inst.phi, &inst.ens.y0, inst.ens.sigma2, 2000, &mut rng)
        .map_err(solver_err)?;
    Ok(Check {
        name: "correlation_stats",
        passed: r.passed,
        detail: format!(
            "mean pass fraction {:.3}, variance pass fraction {:.3}",
            r.mean_pass_fraction, r.variance_pass_fraction
        ),
    })
}

fn check_shrinkage(seed: u64) -> Result<Check, BenchError> {
    let mut rng = rng_from_seed(derive_seed(seed, &[5]));
    let theta: Vec<f64> = (0..50).map(|i| if i % 5 == 0 { 1.0 } else { 0.0 }).collect();
    let r = shrinkage_risk(&theta, 1.0, 5, VarianceMode::ScalarMean, false, 10_000, &mut rng)
        .map_err(solver_err)?;
    Ok(Check {
        name: "js_dominance",
        passed: r.positive_fraction < 0.99 || r.mse_shrunk < r.mse_raw,
        detail: format!(
            "mse raw {:.4}, shrunk {:.4}, positive factor in {:.3} of draws",
            r.mse_raw, r.mse_shrunk, r.positive_fraction
        ),
    })
}

pub fn run_verify(seed: u64) -> Result<VerifyReport, BenchError> {
    let checks = vec![
        check_l0_oracle(seed)?,
        check_omp_equivalence(seed)?,
        check_ric(seed)?,
        check_correlation_stats(seed)?,
        check_shrinkage(seed)?,
    ];
    for c in &checks {
        log::info!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(VerifyReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Writes `verify.json` (or `verify.csv` with one row per check).
pub fn write_verify(report: &VerifyReport, dir: &Path, format: OutputFormat) -> Result<PathBuf, BenchError> {
    match format {
        OutputFormat::Csv => crate::output::write_rows(dir, "verify", format, &report.checks),
        OutputFormat::Json => {
            std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
            let path = dir.join("verify.json");
            let text = serde_json::to_string_pretty(report).map_err(solver_err)? + "\n";
            std::fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?;
            Ok(path)
        }
    }
}
