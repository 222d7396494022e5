//! Experiment configuration, loaded from JSON and overridden from the CLI.

use std::fmt;
use std::path::{Path, PathBuf};

use jsgomp::{HaltNorm, JsOptions, VarianceMode};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::BenchError;

/// JSON schema of the configuration file, printed by `--print-schema`.
pub const CONFIG_SCHEMA: &str = include_str!("../config.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Omp,
    Gomp,
    JsGomp,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Omp => "omp",
            Algorithm::Gomp => "gomp",
            Algorithm::JsGomp => "js_gomp",
        }
    }

    /// Column suffix used in error-trace dumps.
    pub fn trace_label(self) -> &'static str {
        match self {
            Algorithm::Omp => "omp",
            Algorithm::Gomp => "gomp",
            Algorithm::JsGomp => "jsgomp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub name: Algorithm,
    /// Atoms per iteration. OMP always uses 1.
    #[serde(default = "default_n_list", rename = "N")]
    pub n: Vec<usize>,
}

fn default_n_list() -> Vec<usize> {
    vec![1]
}

impl AlgorithmSpec {
    pub fn new(name: Algorithm, n: &[usize]) -> Self {
        Self { name, n: n.to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum JsMode {
    Scalar,
    #[default]
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltNormSetting {
    #[default]
    Mean,
    Frobenius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct JsSettings {
    pub mode: JsMode,
    pub positive_part: bool,
    pub select_raw: bool,
    pub halt_norm: HaltNormSetting,
}

impl From<JsSettings> for JsOptions {
    fn from(s: JsSettings) -> Self {
        JsOptions {
            variance_mode: match s.mode {
                JsMode::Scalar => VarianceMode::ScalarMean,
                JsMode::Quadratic => VarianceMode::PerAtomQuadratic,
            },
            positive_part: s.positive_part,
            select_raw: s.select_raw,
            halt_norm: match s.halt_norm {
                HaltNormSetting::Mean => HaltNorm::MeanResidual,
                HaltNormSetting::Frobenius => HaltNorm::FrobeniusScaled,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
            format: OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(rename = "K_grid")]
    pub k_grid: Vec<usize>,
    /// SNR values, in dB unless `snr_linear` is set. `"inf"` means noiseless.
    #[serde(deserialize_with = "de_snr_grid", serialize_with = "ser_snr_grid")]
    pub snr: Vec<f64>,
    pub snr_linear: bool,
    pub p: usize,
    pub trials: usize,
    pub master_seed: u64,
    /// Success threshold on the relative ℓ2 error. Defaults to 1e-4 when
    /// noiseless and `10^(−SNR_dB/20)` otherwise.
    pub recovery_tol: Option<f64>,
    /// Halting threshold as a multiple of the measurement norm.
    pub halt_tol_rel: f64,
    pub js: JsSettings,
    /// Give OMP/gOMP the first noisy column instead of the ensemble mean.
    pub baseline_single_column: bool,
    pub output: OutputSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: 50,
            n: 500,
            algorithms: vec![
                AlgorithmSpec::new(Algorithm::Omp, &[1]),
                AlgorithmSpec::new(Algorithm::Gomp, &[2, 4, 6]),
                AlgorithmSpec::new(Algorithm::JsGomp, &[2, 4, 6]),
            ],
            k_grid: (1..=8).map(|i| 5 * i).collect(),
            snr: vec![4.0],
            snr_linear: false,
            p: 5,
            trials: 500,
            master_seed: 1,
            recovery_tol: None,
            halt_tol_rel: 1e-6,
            js: JsSettings::default(),
            baseline_single_column: false,
            output: OutputSettings::default(),
        }
    }
}

impl ExperimentConfig {
    /// Defaults for the SNR sweep: K = 5, one atom per iteration.
    pub fn snr_sweep_default() -> Self {
        Self {
            algorithms: vec![
                AlgorithmSpec::new(Algorithm::Omp, &[1]),
                AlgorithmSpec::new(Algorithm::Gomp, &[1]),
                AlgorithmSpec::new(Algorithm::JsGomp, &[1]),
            ],
            k_grid: vec![5],
            snr: vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0],
            ..Self::default()
        }
    }

    /// Defaults for a single error trace: K = 5, N = 1, 4 dB.
    pub fn trace_default() -> Self {
        Self {
            snr: vec![4.0],
            ..Self::snr_sweep_default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_json(&text)
    }

    /// SNR in dB for a configured grid value.
    pub fn snr_db(&self, value: f64) -> f64 {
        if self.snr_linear {
            10.0 * value.log10()
        } else {
            value
        }
    }

    pub fn recovery_tol_for(&self, snr_db: f64) -> f64 {
        self.recovery_tol.unwrap_or(if snr_db.is_finite() {
            10f64.powf(-snr_db / 20.0)
        } else {
            1e-4
        })
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.m == 0 {
            return Err(BenchError::config("m", "must be at least 1"));
        }
        if self.n == 0 {
            return Err(BenchError::config("n", "must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::config("algorithms", "must not be empty"));
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if a.n.is_empty() {
                return Err(BenchError::config(format!("algorithms[{i}].N"), "must not be empty"));
            }
            if a.n.contains(&0) {
                return Err(BenchError::config(format!("algorithms[{i}].N"), "entries must be at least 1"));
            }
            if a.name == Algorithm::Omp && a.n != [1] {
                return Err(BenchError::config(format!("algorithms[{i}].N"), "OMP uses exactly one atom per iteration"));
            }
            if a.name == Algorithm::JsGomp && self.p < 3 {
                return Err(BenchError::config("p", "JS-gOMP needs an ensemble of at least 3"));
            }
        }
        if self.k_grid.is_empty() {
            return Err(BenchError::config("K_grid", "must not be empty"));
        }
        if let Some(&k) = self.k_grid.iter().find(|&&k| k == 0 || k > self.n) {
            return Err(BenchError::config("K_grid", format!("K={k} must lie in [1, n={}]", self.n)));
        }
        if self.snr.is_empty() {
            return Err(BenchError::config("snr", "must not be empty"));
        }
        for &s in &self.snr {
            let db = self.snr_db(s);
            if db.is_nan() || db == f64::NEG_INFINITY {
                return Err(BenchError::config("snr", format!("{s} is not a usable SNR")));
            }
        }
        if self.p == 0 {
            return Err(BenchError::config("p", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(BenchError::config("trials", "must be at least 1"));
        }
        if let Some(t) = self.recovery_tol {
            if !(t >= 0.0) {
                return Err(BenchError::config("recovery_tol", "must be non-negative"));
            }
        }
        if !(self.halt_tol_rel >= 0.0) || !self.halt_tol_rel.is_finite() {
            return Err(BenchError::config("halt_tol_rel", "must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SnrValue {
    Num(f64),
    Text(String),
}

impl SnrValue {
    fn parse<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            SnrValue::Num(v) => Ok(v),
            SnrValue::Text(t) => parse_snr(&t).map_err(E::custom),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SnrGrid {
    One(SnrValue),
    Many(Vec<SnrValue>),
}

fn de_snr_grid<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    match SnrGrid::deserialize(d)? {
        SnrGrid::One(v) => Ok(vec![v.parse()?]),
        SnrGrid::Many(vs) => vs.into_iter().map(SnrValue::parse).collect(),
    }
}

fn ser_snr_grid<S: Serializer>(grid: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(grid.len()))?;
    for v in grid {
        if v.is_finite() {
            seq.serialize_element(v)?;
        } else {
            seq.serialize_element(&crate::output::fmt_f64(*v))?;
        }
    }
    seq.end()
}

/// Parses an SNR value; accepts `inf` for the noiseless limit.
pub fn parse_snr(text: &str) -> Result<f64, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("not a number: {text:?}")),
    }
}
