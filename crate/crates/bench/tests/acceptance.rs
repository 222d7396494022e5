//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line to stderr (bypassing output capture) before asserting.

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use jsgomp::seed::{derive_seed, rng_from_seed};
use jsgomp::{
    error_trace, estimate_ric, gen_sensing_matrix, gomp, js_gomp, l0_oracle, omp, score_trial, shrinkage_risk,
    verify_correlation_stats, identify_top_n, js_shrink, HaltTol, Matrix, ProblemInstance, PursuitConfig,
    RicMethod, SensingMatrix, VarianceMode,
};
use jsgomp_bench::sweep::solve;
use jsgomp_bench::{
    run_snr_sweep, run_sparsity_sweep, trial_seed, Algorithm, AlgorithmSpec, ExperimentConfig, ResultTable,
    RunOptions,
};

const MASTER_SEED: u64 = 1;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("{verdict} criterion {id} [{name}]: {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn noiseless(m: usize, n: usize, k: usize, p: usize, seed: u64) -> ProblemInstance<f64> {
    ProblemInstance::generate(m, n, k, p, f64::INFINITY, seed).unwrap()
}

/// Textbook OMP: greedy argmax of |Φᵀr| and projection onto the span of the
/// chosen atoms via modified Gram-Schmidt. Returns the selection order.
fn textbook_omp(phi: &SensingMatrix<f64>, y: &[f64], k: usize, tol: f64) -> Vec<usize> {
    let (m, n) = (phi.rows(), phi.cols());
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    let mut r = y.to_vec();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    while chosen.len() < k && norm(&r) > tol {
        let mut best = (usize::MAX, -1.0);
        for j in 0..n {
            if chosen.contains(&j) {
                continue;
            }
            let c: f64 = phi.atom(j).iter().zip(&r).map(|(a, b)| a * b).sum::<f64>().abs();
            if c > best.1 {
                best = (j, c);
            }
        }
        let j = best.0;
        chosen.push(j);
        let mut v = phi.atom(j).to_vec();
        for _ in 0..2 {
            for qi in &q {
                let d: f64 = qi.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(qi).for_each(|(vv, qq)| *vv -= d * qq);
            }
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|a| *a /= nv);
        q.push(v);
        r = y.to_vec();
        for qi in &q {
            let d: f64 = qi.iter().zip(&r).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(qi).for_each(|(rr, qq)| *rr -= d * qq);
        }
        assert_eq!(r.len(), m);
    }
    chosen
}

#[test]
fn criterion_1_gomp_n1_matches_textbook_omp() {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for t in 0..100u64 {
        let k = 1 + (t % 10) as usize;
        let inst = noiseless(50, 500, k, 1, derive_seed(MASTER_SEED, &[101, t]));
        let y = &inst.ens.y0;
        let cfg = PursuitConfig::new(1, k);
        let res = gomp(&inst.phi, y, &cfg).unwrap();
        let tol = 1e-6 * y.iter().map(|a| a * a).sum::<f64>().sqrt();
        let expected = textbook_omp(&inst.phi, y, k, tol);
        if res.selection_order != expected {
            mismatches.push(t);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mismatches.is_empty() && secs < 10.0;
    report(1, "gOMP(N=1) = textbook OMP", pass, &format!("{} of 100 differ, {secs:.2}s", mismatches.len()));
    assert!(pass, "mismatching instances {mismatches:?}");
}

#[test]
fn criterion_2_l0_oracle_consistency() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut exact_runs = 0;
    for t in 0..50u64 {
        let inst = noiseless(8, 12, 2, 3, derive_seed(MASTER_SEED, &[102, t]));
        let oracle = l0_oracle(&inst.phi, &inst.ens.y0, 2).unwrap();
        if oracle.residual_norm > 1e-10 {
            failures.push(format!("trial {t}: oracle residual {:e}", oracle.residual_norm));
        }
        let runs = [
            ("omp", omp(&inst.phi, &inst.ens.y0, &PursuitConfig::new(1, 2)).unwrap()),
            ("gomp N=1", gomp(&inst.phi, &inst.ens.y0, &PursuitConfig::new(1, 2)).unwrap()),
            ("gomp N=2", gomp(&inst.phi, &inst.ens.y0, &PursuitConfig::new(2, 2)).unwrap()),
            ("js_gomp N=1", js_gomp(&inst.phi, &inst.ens, &PursuitConfig::new(1, 2)).unwrap()),
            ("js_gomp N=2", js_gomp(&inst.phi, &inst.ens, &PursuitConfig::new(2, 2)).unwrap()),
        ];
        for (name, res) in runs {
            let metrics = score_trial(&inst.x, &res, 1e-4).unwrap();
            if !metrics.exact_recovery {
                continue;
            }
            exact_runs += 1;
            let scale = res.x_hat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let nonzero: Vec<usize> = (0..12).filter(|&i| res.x_hat[i].abs() > 1e-6 * scale).collect();
            if nonzero != oracle.support {
                failures.push(format!("trial {t}: {name} recovered {nonzero:?}, oracle {:?}", oracle.support));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < 5.0;
    report(
        2,
        "l0 oracle consistency",
        pass,
        &format!("{exact_runs} exact solver runs checked, {} failures, {secs:.2}s", failures.len()),
    );
    assert!(pass, "{failures:#?}");
}

#[test]
fn criterion_3_noiseless_reduction() {
    let mut differing = Vec::new();
    for t in 0..100u64 {
        let k = 2 + (t % 9) as usize;
        let n_atoms = 1 + (t % 3) as usize;
        let n_atoms = n_atoms.min(k).min(50 / k);
        let inst = noiseless(50, 500, k, 5, derive_seed(MASTER_SEED, &[103, t]));
        let cfg = PursuitConfig::new(n_atoms, k);
        let g = gomp(&inst.phi, &inst.ens.y0, &cfg).unwrap();
        let j = js_gomp(&inst.phi, &inst.ens, &cfg).unwrap();
        if g.support != j.support || g.selection_order != j.selection_order {
            differing.push(t);
        }
    }
    let pass = differing.is_empty();
    report(3, "noiseless reduction", pass, &format!("{} of 100 supports differ", differing.len()));
    assert!(pass, "{differing:?}");
}

#[test]
fn criterion_4_js_dominance() {
    let start = Instant::now();
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, &[104]));
    let thetas: Vec<(&str, Vec<f64>)> = vec![
        ("zero", vec![0.0; 50]),
        ("sparse", (0..50).map(|i| if i < 5 { 2.0 } else { 0.0 }).collect()),
        ("flat", vec![0.5; 50]),
        ("large", (0..50).map(|i| (i as f64 - 25.0) / 5.0).collect()),
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    let mut applicable = 0;
    for (label, theta) in &thetas {
        for p in [3usize, 5, 50] {
            for (mode, positive) in [(VarianceMode::ScalarMean, false), (VarianceMode::PerAtomQuadratic, true)] {
                let r = shrinkage_risk(theta, 1.0, p, mode, positive, 10_000, &mut rng).unwrap();
                if r.positive_fraction >= 0.99 {
                    applicable += 1;
                    if !(r.mse_shrunk < r.mse_raw) {
                        pass = false;
                        lines.push(format!("{label} p={p}: shrunk {} >= raw {}", r.mse_shrunk, r.mse_raw));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= applicable > 0 && secs < 30.0;
    report(
        4,
        "JS dominance",
        pass,
        &format!("{applicable} applicable settings, {} violations, {secs:.2}s", lines.len()),
    );
    assert!(pass, "{lines:#?}");
}

fn paired_counts(table: &ResultTable, a: Algorithm, b: Algorithm, n_atoms: usize, k: usize) -> (usize, usize, usize) {
    let outcome = |alg: Algorithm| -> Vec<bool> {
        let mut rows: Vec<_> = table
            .raw
            .iter()
            .filter(|r| r.algorithm == alg && r.n_atoms == n_atoms && r.k == k)
            .map(|r| (r.trial, r.metrics.exact_recovery))
            .collect();
        rows.sort_unstable();
        rows.into_iter().map(|(_, s)| s).collect()
    };
    let (xa, xb) = (outcome(a), outcome(b));
    assert_eq!(xa.len(), xb.len());
    let only_a = xa.iter().zip(&xb).filter(|(p, q)| **p && !**q).count();
    let only_b = xa.iter().zip(&xb).filter(|(p, q)| !**p && **q).count();
    (only_a, only_b, xa.len())
}

fn critical_sparsity(table: &ResultTable, alg: Algorithm, n_atoms: usize) -> usize {
    table
        .aggregate
        .iter()
        .filter(|r| r.algorithm == alg && r.n_atoms == n_atoms && r.success_frequency >= 0.99)
        .map(|r| r.k)
        .max()
        .unwrap_or(0)
}

#[test]
fn criterion_5_sparsity_sweep() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        m: 50,
        n: 500,
        p: 5,
        snr: vec![4.0],
        k_grid: (1..=8).map(|i| 5 * i).collect(),
        trials: 500,
        master_seed: MASTER_SEED,
        algorithms: vec![
            AlgorithmSpec::new(Algorithm::Omp, &[1]),
            AlgorithmSpec::new(Algorithm::Gomp, &[2]),
            AlgorithmSpec::new(Algorithm::JsGomp, &[2]),
        ],
        ..Default::default()
    };
    let table = run_sparsity_sweep(&cfg, RunOptions::default()).unwrap();

    let mut dominated = true;
    let mut strict = Vec::new();
    let mut curve = Vec::new();
    for &k in &cfg.k_grid {
        let (Some(g), Some(j)) = (
            table.find(Algorithm::Gomp, 2, k, 4.0),
            table.find(Algorithm::JsGomp, 2, k, 4.0),
        ) else {
            continue;
        };
        // JS-only successes b, gOMP-only successes c
        let (b, c, n) = paired_counts(&table, Algorithm::JsGomp, Algorithm::Gomp, 2, k);
        let nf = n as f64;
        let diff = (b as f64 - c as f64) / nf;
        let se = ((b + c) as f64 - (b as f64 - c as f64).powi(2) / nf).max(0.0).sqrt() / nf;
        dominated &= j.success_frequency >= g.success_frequency;
        if diff > 0.0 && diff > 2.0 * se {
            strict.push(k);
        }
        curve.push(format!(
            "K={k}: js {:.3} gomp {:.3} (+{b}/-{c}, diff {diff:.4}, 2se {:.4})",
            j.success_frequency,
            g.success_frequency,
            2.0 * se
        ));
    }
    let omp_curve: Vec<String> = cfg
        .k_grid
        .iter()
        .filter_map(|&k| table.find(Algorithm::Omp, 1, k, 4.0))
        .map(|r| format!("K={}: {:.3}", r.k, r.success_frequency))
        .collect();
    let (cj, cg, co) = (
        critical_sparsity(&table, Algorithm::JsGomp, 2),
        critical_sparsity(&table, Algorithm::Gomp, 2),
        critical_sparsity(&table, Algorithm::Omp, 1),
    );
    let ordered = cj >= cg && cg >= co;
    let secs = start.elapsed().as_secs_f64();
    let pass = dominated && !strict.is_empty() && ordered && secs < 900.0;
    report(
        5,
        "sparsity sweep",
        pass,
        &format!(
            "pointwise >= {dominated}; strictly better at K={strict:?}; critical sparsity js {cj} gomp {cg} omp {co}; \
             {} | omp {}; {secs:.1}s",
            curve.join("; "),
            omp_curve.join(", ")
        ),
    );
    assert!(pass);
}

fn paired_diff_stats(table: &ResultTable, k: usize, snr: f64, f: impl Fn(&jsgomp::TrialMetrics) -> f64) -> (f64, f64) {
    let values = |alg: Algorithm| -> Vec<f64> {
        let mut rows: Vec<_> = table
            .raw
            .iter()
            .filter(|r| r.algorithm == alg && r.k == k && r.snr.to_bits() == snr.to_bits())
            .map(|r| (r.trial, f(&r.metrics)))
            .collect();
        rows.sort_by_key(|(t, _)| *t);
        rows.into_iter().map(|(_, v)| v).collect()
    };
    let d: Vec<f64> = values(Algorithm::JsGomp)
        .iter()
        .zip(values(Algorithm::Gomp))
        .map(|(j, g)| j - g)
        .collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn criterion_6_snr_sweep() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        master_seed: MASTER_SEED,
        ..ExperimentConfig::snr_sweep_default()
    };
    let table = run_snr_sweep(&cfg, RunOptions::default()).unwrap();
    let k = cfg.k_grid[0];
    let mut details = Vec::new();

    // gOMP atom count against SNR, from highest to lowest SNR
    let mut grid = cfg.snr.clone();
    grid.sort_by(|a, b| b.total_cmp(a));
    let rows: Vec<_> = grid.iter().map(|&s| table.find(Algorithm::Gomp, 1, k, s).unwrap()).collect();
    let se = |r: &jsgomp_bench::AggregateRow| r.std_atom_count / (r.trials as f64).sqrt();
    let non_decreasing = rows
        .windows(2)
        .all(|w| w[1].mean_atom_count + 2.0 * (se(w[0]).hypot(se(w[1]))) >= w[0].mean_atom_count);
    let (hi, lo) = (rows[0], rows[rows.len() - 1]);
    let rise = lo.mean_atom_count - hi.mean_atom_count;
    let increases = non_decreasing && rise > 2.0 * se(hi).hypot(se(lo));
    details.push(format!(
        "gomp atoms by SNR {:?}: {:?}",
        grid,
        rows.iter().map(|r| r.mean_atom_count).collect::<Vec<_>>()
    ));

    let mut js_ok = true;
    for &s in &cfg.snr {
        let (d_atoms, se_atoms) = paired_diff_stats(&table, k, s, |m| m.atom_count as f64);
        let (d_psnr, se_psnr) = paired_diff_stats(&table, k, s, |m| m.psnr_db);
        let atoms_ok = d_atoms <= 2.0 * se_atoms;
        let psnr_ok = d_psnr >= -2.0 * se_psnr;
        js_ok &= atoms_ok && psnr_ok;
        details.push(format!(
            "{s} dB: js-gomp atoms {d_atoms:+.3} (se {se_atoms:.3}), psnr {d_psnr:+.3} dB (se {se_psnr:.3})"
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = increases && js_ok && secs < 600.0;
    report(
        6,
        "SNR sweep",
        pass,
        &format!(
            "gomp atom count increases as SNR falls: {increases}; js-gomp within 2 se at every SNR: {js_ok}; {}; {secs:.1}s",
            details.join("; ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_error_trace_rms() {
    let cfg = ExperimentConfig {
        master_seed: MASTER_SEED,
        ..ExperimentConfig::trace_default()
    };
    let (k, snr) = (cfg.k_grid[0], cfg.snr[0]);
    let mut sq = [0.0f64; 3];
    let mut count = 0usize;
    for t in 0..100 {
        let inst = ProblemInstance::generate(cfg.m, cfg.n, k, cfg.p, snr, trial_seed(MASTER_SEED, k, snr, t)).unwrap();
        for (slot, alg) in [Algorithm::Omp, Algorithm::Gomp, Algorithm::JsGomp].into_iter().enumerate() {
            let res = solve(&cfg, alg, 1, &inst).unwrap();
            sq[slot] += error_trace(&inst.x, &res.x_hat).iter().map(|e| e * e).sum::<f64>();
        }
        count += cfg.n;
    }
    let [omp_rms, gomp_rms, js_rms] = sq.map(|s| (s / count as f64).sqrt());
    let pass = js_rms <= gomp_rms && js_rms <= omp_rms;
    report(
        7,
        "error trace RMS",
        pass,
        &format!("rms omp {omp_rms:.6e}, gomp {gomp_rms:.6e}, js-gomp {js_rms:.6e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_8_ric_oracle() {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, &[108]));
    let mut problems = Vec::new();

    // signed, permuted unit vectors: orthonormal columns
    let cols: Vec<Vec<f64>> = (0..10)
        .map(|j| {
            let mut c = vec![0.0; 12];
            c[(j * 7) % 12] = if j % 2 == 0 { 1.0 } else { -1.0 };
            c
        })
        .collect();
    let ortho: SensingMatrix<f64> = Matrix::from_columns(&cols).unwrap().into();
    for k in 1..=4 {
        let d = estimate_ric(&ortho, k, RicMethod::Exhaustive, 0, &mut rng).unwrap().delta_lower;
        if d != 0.0 {
            problems.push(format!("orthonormal delta_{k} = {d:e}"));
        }
    }

    let dup: SensingMatrix<f64> =
        Matrix::from_columns(&[vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.8]]).unwrap().into();
    let d2 = estimate_ric(&dup, 2, RicMethod::Exhaustive, 0, &mut rng).unwrap().delta_lower;
    if (d2 - 1.0).abs() > 1e-12 {
        problems.push(format!("duplicated column delta_2 = {d2}"));
    }

    let mut comparisons = 0;
    for t in 0..20u64 {
        let phi = gen_sensing_matrix::<f64>(8, 12, &mut rng_from_seed(derive_seed(MASTER_SEED, &[108, t]))).unwrap();
        for k in 1..=4 {
            let exact = estimate_ric(&phi, k, RicMethod::Exhaustive, 0, &mut rng).unwrap();
            let sampled = estimate_ric(&phi, k, RicMethod::RandomSupports, 25, &mut rng).unwrap();
            comparisons += 1;
            if sampled.delta_lower > exact.delta_lower {
                problems.push(format!("matrix {t} K={k}: sampled {} > exact {}", sampled.delta_lower, exact.delta_lower));
            }
        }
    }
    let pass = problems.is_empty();
    report(
        8,
        "RIC oracle",
        pass,
        &format!("orthonormal delta = 0, duplicated delta_2 = {d2}, {comparisons} sampled/exhaustive comparisons, {} problems", problems.len()),
    );
    assert!(pass, "{problems:#?}");
}

fn bench_sweep(out: &std::path::Path, jobs: &str) -> Vec<Vec<u8>> {
    let status = Command::new(env!("CARGO_BIN_EXE_jsgomp-bench"))
        .args(["sweep-k", "--quiet", "--trials", "20", "--k-grid", "2,5,10", "--snr", "4", "--seed"])
        .arg(MASTER_SEED.to_string())
        .args(["--jobs", jobs, "--out"])
        .arg(out)
        .status()
        .unwrap();
    assert!(status.success());
    ["raw.csv", "aggregate.csv"].iter().map(|f| std::fs::read(out.join(f)).unwrap()).collect()
}

#[test]
fn criterion_9_invariant_suite() {
    let mut failures: Vec<String> = Vec::new();

    // residual orthogonality, monotone residual norms, support growth
    for t in 0..40u64 {
        let k = 2 + (t % 8) as usize;
        let n_atoms = [1, 2, 4][(t % 3) as usize].min(k).min(50 / k);
        let inst = ProblemInstance::<f64>::generate(50, 500, k, 5, 4.0, derive_seed(MASTER_SEED, &[109, t])).unwrap();
        let cfg = PursuitConfig::new(n_atoms, k).with_halt_tol(HaltTol::Relative(1e-6));
        let y = inst.ens.mean();
        let ynorm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        let yfro = inst.ens.y.frobenius_norm();
        for (name, res, scale) in [
            ("gomp", gomp(&inst.phi, &y, &cfg).unwrap(), ynorm),
            ("js_gomp", js_gomp(&inst.phi, &inst.ens, &cfg).unwrap(), yfro),
        ] {
            let fit = inst.phi.matrix().matvec(&res.x_hat).unwrap();
            let r: Vec<f64> = y.iter().zip(&fit).map(|(a, b)| a - b).collect();
            let worst = res
                .support
                .iter()
                .map(|&i| inst.phi.atom(i).iter().zip(&r).map(|(a, b)| a * b).sum::<f64>().abs())
                .fold(0.0, f64::max);
            if worst > 1e-8 * scale {
                failures.push(format!("{name} trial {t}: |Φ_Λᵀr|∞ = {worst:e}"));
            }
            if res.residual_norm_trace.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
                failures.push(format!("{name} trial {t}: residual norms increase"));
            }
            if res.selection_order.len() != res.iterations * n_atoms || res.support.len() != res.selection_order.len() {
                failures.push(format!(
                    "{name} trial {t}: {} atoms after {} iterations of N={n_atoms}",
                    res.selection_order.len(),
                    res.iterations
                ));
            }
        }
    }

    // scalar shrinkage with equal atom norms preserves the ranking
    for t in 0..20u64 {
        let mut rng = rng_from_seed(derive_seed(MASTER_SEED, &[109, 1, t]));
        let raw = gen_sensing_matrix::<f64>(30, 80, &mut rng).unwrap();
        let cols: Vec<Vec<f64>> = (0..80)
            .map(|i| raw.atom(i).iter().map(|v| v / raw.col_norms()[i]).collect())
            .collect();
        let phi: SensingMatrix<f64> = Matrix::from_columns(&cols).unwrap().into();
        let inst = ProblemInstance::<f64>::generate(30, 80, 4, 5, 2.0, derive_seed(MASTER_SEED, &[109, 2, t])).unwrap();
        let cr = phi.matrix().transpose_matvec(&inst.ens.mean()).unwrap();
        let sig: Vec<f64> = (0..30).map(|i| 0.01 + 0.001 * i as f64).collect();
        let sh = js_shrink(&cr, &sig, &phi, 5, VarianceMode::ScalarMean, false).unwrap();
        if sh.factors.iter().all(|f| *f > 0.0)
            && identify_top_n(&cr, 10, &[]).unwrap() != identify_top_n(&sh.values, 10, &[]).unwrap()
        {
            failures.push(format!("scalar shrinkage reorders atoms (draw {t})"));
        }
    }

    // correlation statistics against σ²‖φ_i‖², 10% tolerance
    let inst = ProblemInstance::<f64>::generate(50, 500, 5, 5, 4.0, derive_seed(MASTER_SEED, &[109, 3])).unwrap();
    let stats = verify_correlation_stats(
        &inst.phi,
        &inst.ens.y0,
        inst.ens.sigma2,
        4000,
        &mut rng_from_seed(derive_seed(MASTER_SEED, &[109, 4])),
    )
    .unwrap();
    if !stats.passed {
        failures.push(format!(
            "correlation statistics: mean pass {:.3}, variance pass {:.3}",
            stats.mean_pass_fraction, stats.variance_pass_fraction
        ));
    }

    // byte determinism across worker counts
    let dir = tempfile::tempdir().unwrap();
    let one = bench_sweep(&dir.path().join("jobs1"), "1");
    let eight = bench_sweep(&dir.path().join("jobs8"), "8");
    if one != eight {
        failures.push("--jobs 1 and --jobs 8 outputs differ".into());
    }

    let pass = failures.is_empty();
    report(
        9,
        "invariant suite",
        pass,
        &format!(
            "orthogonality/monotonicity/growth on 80 runs, ranking on 20 draws, correlation stats \
             (variance pass {:.3}), jobs 1 vs 8; {} failures",
            stats.variance_pass_fraction,
            failures.len()
        ),
    );
    assert!(pass, "{failures:#?}");
}
