use std::path::Path;
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jsgomp-bench"))
        .args(args)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, file: &str) -> Vec<u8> {
    std::fs::read(dir.join(file)).unwrap()
}

fn sweep(out: &Path, jobs: &str, trials: &str) -> Output {
    bench(&[
        "sweep-k",
        "--trials",
        trials,
        "--k-grid",
        "2,4,8",
        "--snr",
        "6",
        "--seed",
        "42",
        "--jobs",
        jobs,
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(sweep(&a, "2", "1").status.success());
    assert!(sweep(&b, "2", "1").status.success());
    for f in ["raw.csv", "aggregate.csv"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("j1"), dir.path().join("j8"));
    assert!(sweep(&a, "1", "12").status.success());
    assert!(sweep(&b, "8", "12").status.success());
    for f in ["raw.csv", "aggregate.csv"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
    let timing = String::from_utf8(read(&a, "timing_raw.csv")).unwrap();
    assert!(timing.starts_with("algorithm,N,K,snr,trial,runtime_seconds\n"));
}

#[test]
fn json_output_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["sweep-snr", "--trials", "2", "--snr", "0,inf", "--out", out];
    assert!(bench(&args).status.success());
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert!(bench(&json_args).status.success());
    let csv = String::from_utf8(read(dir.path(), "aggregate.csv")).unwrap();
    let json: serde_json::Value = serde_json::from_slice(&read(dir.path(), "aggregate.json")).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    let mut sorted = header.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
    assert_eq!(rows.last().unwrap()["snr"], "inf");
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"m": 20, "n": 40, "algorithms": [{"name": "gomp", "N": [1]}], "K_grid": [2], "snr": "inf", "trials": 3}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = bench(&["sweep-k", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let agg = String::from_utf8(read(&out, "aggregate.csv")).unwrap();
    assert_eq!(agg.lines().count(), 2);
    assert!(agg.lines().nth(1).unwrap().starts_with("gomp,1,2,inf,inf,3,3,1.0,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bench(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(bench(&[]).status.code(), Some(1));

    let o = bench(&["sweep-k", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`trials`"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"K_grid": []}"#).unwrap();
    let o = bench(&["sweep-k", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`K_grid`"));

    let missing = dir.path().join("missing.json");
    assert_eq!(bench(&["sweep-k", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    let o = bench(&["trace", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = bench(&["ric", "--method", "exhaustive", "--k-max", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn print_schema_and_subcommands() {
    let o = bench(&["--print-schema"]);
    assert!(o.status.success());
    let schema: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(schema["properties"]["algorithms"].is_object());

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(bench(&["trace", "--out", out]).status.success());
    let trace = String::from_utf8(read(dir.path(), "trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "index,x_actual,x_recon_omp,x_recon_gomp,x_recon_jsgomp");
    assert_eq!(trace.lines().count(), 501);

    assert!(bench(&["ric", "--k-max", "2", "--budget", "50", "--out", out]).status.success());
    assert!(read(dir.path(), "ric.csv").starts_with(b"K,method,supports_checked,delta_lower,cond_n1"));
}
