//! Random problem instances: Gaussian sensing matrices, K-sparse Gaussian
//! signals and noisy measurement ensembles at a prescribed SNR.
//!
//! Every draw is made from an explicit generator, so an instance is a pure
//! function of its dimensions, parameters and seed. Draws happen in `f64` and
//! are converted to the target scalar afterwards.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{norm2, LinalgError, Matrix};
use crate::seed::{rng_from_seed, Rng};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("dimensions must be positive, got m={m}, n={n}")]
    EmptyDimensions { m: usize, n: usize },
    #[error("sparsity K={k} must satisfy 1 <= K <= n={n}")]
    SparsityOutOfRange { k: usize, n: usize },
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("ensemble size p must be at least 1")]
    EmptyEnsemble,
    #[error("clean measurement is identically zero, SNR is undefined")]
    ZeroSignal,
    #[error("signal dimension {signal} does not match {cols} dictionary columns")]
    SignalMismatch { signal: usize, cols: usize },
    #[error("regenerated instance differs from the stored document in {0}")]
    RegenerationMismatch(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T, E = ProblemError> = std::result::Result<T, E>;

/// A dictionary together with the ℓ2 norm of each of its columns (atoms).
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix<T> {
    matrix: Matrix<T>,
    col_norms: Vec<T>,
}

impl<T: Scalar> SensingMatrix<T> {
    pub fn new(matrix: Matrix<T>) -> Self {
        let col_norms = matrix.columns().map(norm2).collect();
        Self { matrix, col_norms }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn col_norms(&self) -> &[T] {
        &self.col_norms
    }

    pub fn atom(&self, i: usize) -> &[T] {
        self.matrix.col(i)
    }
}

impl<T: Scalar> From<Matrix<T>> for SensingMatrix<T> {
    fn from(matrix: Matrix<T>) -> Self {
        Self::new(matrix)
    }
}

/// Ground-truth sparse vector stored by its support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal<T> {
    n: usize,
    support: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseSignal<T> {
    /// `support` must be strictly increasing and inside `[0, n)`.
    pub fn new(n: usize, support: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(ProblemError::InvalidSupport(format!(
                "{} indices but {} values",
                support.len(),
                values.len()
            )));
        }
        if support.len() > n {
            return Err(ProblemError::SparsityOutOfRange {
                k: support.len(),
                n,
            });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ProblemError::InvalidSupport(
                "indices must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = support.last() {
            if last >= n {
                return Err(ProblemError::InvalidSupport(format!(
                    "index {last} out of range for n={n}"
                )));
            }
        }
        Ok(Self { n, support, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }

    /// Extracts the nonzero pattern of a dense vector.
    pub fn from_dense(x: &[T]) -> Self {
        let (support, values) = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != T::zero())
            .map(|(i, &v)| (i, v))
            .unzip();
        Self {
            n: x.len(),
            support,
            values,
        }
    }
}

/// The clean measurement and `p` independently corrupted copies of it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble<T> {
    pub y0: Vec<T>,
    /// `m x p`, one noisy measurement per column.
    pub y: Matrix<T>,
    /// Per-component noise variance actually used.
    pub sigma2: T,
    pub snr_db: f64,
}

impl<T: Scalar> MeasurementEnsemble<T> {
    pub fn p(&self) -> usize {
        self.y.cols()
    }

    pub fn m(&self) -> usize {
        self.y.rows()
    }

    pub fn mean(&self) -> Vec<T> {
        self.y.column_mean()
    }
}

pub fn gen_sensing_matrix<T: Scalar>(m: usize, n: usize, rng: &mut Rng) -> Result<SensingMatrix<T>> {
    if m == 0 || n == 0 {
        return Err(ProblemError::EmptyDimensions { m, n });
    }
    let scale = 1.0 / (m as f64).sqrt();
    let data = (0..m * n)
        .map(|_| T::of(rng.sample::<f64, _>(StandardNormal) * scale))
        .collect();
    Ok(SensingMatrix::new(Matrix::from_col_major(m, n, data)?))
}

/// Uniformly random support of size `k`, standard normal values.
pub fn gen_sparse_signal<T: Scalar>(n: usize, k: usize, rng: &mut Rng) -> Result<SparseSignal<T>> {
    if k == 0 || k > n {
        return Err(ProblemError::SparsityOutOfRange { k, n });
    }
    let mut support = rand::seq::index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let values = (0..k)
        .map(|_| loop {
            let v = T::of(rng.sample::<f64, _>(StandardNormal));
            if v != T::zero() {
                break v;
            }
        })
        .collect();
    SparseSignal::new(n, support, values)
}

/// Noise variance giving `snr_db` for a clean measurement of squared norm
/// `energy` over `m` components. Returns 0 for `snr_db = +∞`.
pub fn noise_variance(energy: f64, m: usize, snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    energy / (m as f64 * 10f64.powf(snr_db / 10.0))
}

/// Measures `x` through `phi` and corrupts `p` copies with white Gaussian
/// noise so that `‖y0‖² / (m σ²) = 10^(snr_db/10)`. `snr_db = +∞` means no
/// noise.
pub fn gen_ensemble<T: Scalar>(
    phi: &SensingMatrix<T>,
    x: &SparseSignal<T>,
    snr_db: f64,
    p: usize,
    rng: &mut Rng,
) -> Result<MeasurementEnsemble<T>> {
    if p == 0 {
        return Err(ProblemError::EmptyEnsemble);
    }
    if x.n() != phi.cols() {
        return Err(ProblemError::SignalMismatch {
            signal: x.n(),
            cols: phi.cols(),
        });
    }
    let y0 = phi.matrix().matvec(&x.to_dense())?;
    let energy: f64 = y0.iter().map(|v| v.to_f64_lossy().powi(2)).sum();
    if energy == 0.0 {
        return Err(ProblemError::ZeroSignal);
    }
    let m = y0.len();
    let sigma2 = noise_variance(energy, m, snr_db);
    let sd = sigma2.sqrt();
    let mut data = Vec::with_capacity(m * p);
    for _ in 0..p {
        if sigma2 == 0.0 {
            data.extend_from_slice(&y0);
        } else {
            data.extend(
                y0.iter()
                    .map(|&v| v + T::of(sd * rng.sample::<f64, _>(StandardNormal))),
            );
        }
    }
    Ok(MeasurementEnsemble {
        y: Matrix::from_col_major(m, p, data)?,
        y0,
        sigma2: T::of(sigma2),
        snr_db,
    })
}

/// One experimental triple `(Φ, x, Y)` and the seed it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance<T> {
    pub phi: SensingMatrix<T>,
    pub x: SparseSignal<T>,
    pub ens: MeasurementEnsemble<T>,
    pub seed: u64,
}

impl<T: Scalar> ProblemInstance<T> {
    /// Draws matrix, signal and noise, in that order, from one stream
    /// seeded with `seed`.
    pub fn generate(m: usize, n: usize, k: usize, p: usize, snr_db: f64, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let phi = gen_sensing_matrix(m, n, &mut rng)?;
        let x = gen_sparse_signal(n, k, &mut rng)?;
        let ens = gen_ensemble(&phi, &x, snr_db, p, &mut rng)?;
        Ok(Self { phi, x, ens, seed })
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            m: self.phi.rows(),
            n: self.phi.cols(),
            k: self.x.sparsity(),
            p: self.ens.p(),
            snr_db: self.ens.snr_db,
            seed: self.seed,
            support: self.x.support().to_vec(),
            values: self.x.values().iter().map(|v| v.to_f64_lossy()).collect(),
        }
    }
}

/// Serializable description of a [`ProblemInstance`]. The matrix and noise
/// are not stored; they are regenerated from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub p: usize,
    #[serde(with = "extended_f64")]
    pub snr_db: f64,
    pub seed: u64,
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

impl InstanceDoc {
    /// Rebuilds the instance and checks it against the stored signal.
    pub fn regenerate<T: Scalar>(&self) -> Result<ProblemInstance<T>> {
        let inst = ProblemInstance::generate(self.m, self.n, self.k, self.p, self.snr_db, self.seed)?;
        if inst.x.support() != self.support.as_slice() {
            return Err(ProblemError::RegenerationMismatch("support"));
        }
        let same_values = inst
            .x
            .values()
            .iter()
            .zip(&self.values)
            .all(|(&a, &b)| a == T::of(b));
        if !same_values || self.values.len() != inst.x.sparsity() {
            return Err(ProblemError::RegenerationMismatch("values"));
        }
        Ok(inst)
    }
}

/// JSON has no infinities; `±∞` and NaN are written as strings.
pub mod extended_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}
