//! Experiment harness for the `jsgomp` solvers: Monte-Carlo sweeps over
//! sparsity and SNR, error-trace dumps, RIC probes and oracle checks, with
//! CSV/JSON output.

pub mod config;
pub mod error;
pub mod output;
pub mod ric;
pub mod sweep;
pub mod trace;
pub mod verify;

pub use config::{Algorithm, AlgorithmSpec, ExperimentConfig, JsMode, JsSettings, OutputFormat};
pub use error::BenchError;
pub use sweep::{run_snr_sweep, run_sparsity_sweep, trial_seed, AggregateRow, ResultTable, RunOptions, TrialRecord};
