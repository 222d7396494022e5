use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jsgomp::RicMethod;
use jsgomp_bench::config::{parse_snr, CONFIG_SCHEMA};
use jsgomp_bench::{
    output, ric, run_snr_sweep, run_sparsity_sweep, trace, trial_seed, verify, BenchError, ExperimentConfig,
    JsMode, OutputFormat, RunOptions,
};

/// Sparse-recovery experiments for OMP, gOMP and JS-gOMP.
#[derive(Parser)]
#[command(name = "jsgomp-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// JSON experiment configuration; see --print-schema.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Interpret SNR values as power ratios instead of dB.
    #[arg(long, global = true)]
    snr_linear: bool,
    #[arg(long, global = true, value_enum)]
    js_mode: Option<JsMode>,
    /// Clip negative shrinkage factors at zero.
    #[arg(long, global = true)]
    js_positive_part: bool,
    /// Rank atoms by the unshrunk correlations.
    #[arg(long, global = true)]
    select_raw: bool,
    /// Feed OMP/gOMP one noisy column instead of the ensemble mean.
    #[arg(long, global = true)]
    baseline_single_column: bool,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated sparsity grid.
    #[arg(long = "k-grid", global = true, value_delimiter = ',')]
    k_grid: Option<Vec<usize>>,
    /// Comma-separated SNR grid; `inf` is noiseless.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_snr, allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Ensemble size.
    #[arg(long, global = true)]
    p: Option<usize>,
    /// Print the configuration JSON schema and exit.
    #[arg(long)]
    print_schema: bool,
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RicMethodArg {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Recovery statistics against sparsity K at one SNR.
    SweepK,
    /// Recovery statistics against SNR at one K.
    SweepSnr,
    /// Per-index reconstructions of one instance.
    Trace {
        /// Instance seed; defaults to trial 0 of the configured grid point.
        #[arg(long)]
        trial_seed: Option<u64>,
    },
    /// Restricted isometry constants and gOMP condition verdicts.
    Ric {
        #[arg(long = "k-max", default_value_t = 5)]
        k_max: usize,
        /// Comma-separated atoms-per-iteration values to test.
        #[arg(long = "atoms", value_delimiter = ',', default_value = "1,2,4,6")]
        atoms: Vec<usize>,
        #[arg(long, value_enum, default_value = "random")]
        method: RicMethodArg,
        /// Supports sampled per order with --method random.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
    },
    /// Run the ground-truth oracles.
    Verify,
}

fn build_config(g: &Global, base: ExperimentConfig) -> Result<ExperimentConfig, BenchError> {
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => base,
    };
    if let Some(s) = g.seed {
        cfg.master_seed = s;
    }
    if let Some(o) = &g.out {
        cfg.output.dir = o.clone();
    }
    if let Some(f) = g.format {
        cfg.output.format = f;
    }
    if g.snr_linear {
        cfg.snr_linear = true;
    }
    if let Some(m) = g.js_mode {
        cfg.js.mode = m;
    }
    cfg.js.positive_part |= g.js_positive_part;
    cfg.js.select_raw |= g.select_raw;
    cfg.baseline_single_column |= g.baseline_single_column;
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if let Some(k) = &g.k_grid {
        cfg.k_grid = k.clone();
    }
    if let Some(s) = &g.snr {
        cfg.snr = s.clone();
    }
    if let Some(p) = g.p {
        cfg.p = p;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let g = &cli.global;
    let opts = RunOptions {
        jobs: g.jobs.unwrap_or(0),
        progress: !g.quiet,
    };
    let Some(command) = cli.command else {
        return Err(BenchError::config("command", "a subcommand is required (see --help)"));
    };
    let written = match command {
        Command::SweepK => {
            let cfg = build_config(g, ExperimentConfig::default())?;
            let table = run_sparsity_sweep(&cfg, opts)?;
            output::write_table(&table, &cfg.output.dir, cfg.output.format)?
        }
        Command::SweepSnr => {
            let cfg = build_config(g, ExperimentConfig::snr_sweep_default())?;
            let table = run_snr_sweep(&cfg, opts)?;
            output::write_table(&table, &cfg.output.dir, cfg.output.format)?
        }
        Command::Trace { trial_seed: seed } => {
            let cfg = build_config(g, ExperimentConfig::trace_default())?;
            let seed = match (seed, &cfg.k_grid[..], &cfg.snr[..]) {
                (Some(s), _, _) => s,
                (None, [k], [snr]) => trial_seed(cfg.master_seed, *k, *snr, 0),
                _ => return Err(BenchError::config("K_grid", "trace takes exactly one K and one SNR")),
            };
            vec![trace::dump_error_trace(&cfg, seed)?]
        }
        Command::Ric {
            k_max,
            atoms,
            method,
            budget,
        } => {
            let cfg = build_config(g, ExperimentConfig::default())?;
            let method = match method {
                RicMethodArg::Exhaustive => RicMethod::Exhaustive,
                RicMethodArg::Random => RicMethod::RandomSupports,
            };
            let rows = ric::probe_ric(cfg.m, cfg.n, k_max, &atoms, method, budget, cfg.master_seed)?;
            vec![ric::write_ric(&rows, &cfg.output.dir, cfg.output.format)?]
        }
        Command::Verify => {
            let cfg = build_config(g, ExperimentConfig::default())?;
            let report = verify::run_verify(cfg.master_seed)?;
            let path = verify::write_verify(&report, &cfg.output.dir, cfg.output.format)?;
            println!("{}", path.display());
            if !report.passed {
                return Err(BenchError::Solver("one or more oracle checks failed".into()));
            }
            return Ok(());
        }
    };
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.global.print_schema {
        print!("{CONFIG_SCHEMA}");
        return ExitCode::SUCCESS;
    }
    env_logger::Builder::new()
        .filter_level(if cli.global.quiet {
            log::LevelFilter::Warn
        } else {
            log::LevelFilter::Info
        })
        .parse_default_env()
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
