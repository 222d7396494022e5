//! Ground-truth oracles and trial metrics.

use itertools::Itertools;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{norm2, symmetric_eigenvalues, Householder, LinalgError};
use crate::problem::{SensingMatrix, SparseSignal};
use crate::pursuit::PursuitResult;
use crate::seed::Rng;
use crate::Scalar;

/// Largest number of supports an exhaustive enumeration may visit.
pub const MAX_ENUMERATION: u128 = 1_000_000;

/// Fraction of atoms that must pass each per-atom check in
/// [`verify_correlation_stats`].
pub const CORRELATION_PASS_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("sparsity K={k} must satisfy 1 <= K <= n={n}")]
    SparsityOutOfRange { k: usize, n: usize },
    #[error("C({n}, {k}) = {count} supports exceeds the enumeration limit of {MAX_ENUMERATION}; use a smaller instance")]
    EnumerationTooLarge { n: usize, k: usize, count: u128 },
    #[error("sampling budget must be positive")]
    ZeroBudget,
    #[error("at least {min} draws are required, got {got}")]
    TooFewDraws { min: usize, got: usize },
    #[error("no support of size {0} gives a full-rank subsystem")]
    NoFeasibleSupport(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shrinkage failed: {0}")]
    Shrinkage(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn guard_enumeration(n: usize, k: usize) -> Result<u128> {
    if k == 0 || k > n {
        return Err(AnalysisError::SparsityOutOfRange { k, n });
    }
    let count = binomial(n, k);
    if count > MAX_ENUMERATION {
        return Err(AnalysisError::EnumerationTooLarge { n, k, count });
    }
    Ok(count)
}

/// Best K-term approximation found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct L0Solution<T> {
    pub support: Vec<usize>,
    pub coefficients: Vec<T>,
    pub residual_norm: T,
}

impl<T: Scalar> L0Solution<T> {
    pub fn to_signal(&self, n: usize) -> SparseSignal<T> {
        SparseSignal::new(n, self.support.clone(), self.coefficients.clone())
            .expect("enumerated supports are sorted and in range")
    }
}

/// Solves `min ‖y − Φx‖` over all `x` with exactly `k` nonzeros by trying
/// every support. Ties keep the lexicographically smallest support;
/// rank-deficient supports are skipped.
pub fn l0_oracle<T: Scalar>(phi: &SensingMatrix<T>, y: &[T], k: usize) -> Result<L0Solution<T>> {
    let n = phi.cols();
    guard_enumeration(n, k)?;
    if y.len() != phi.rows() {
        return Err(AnalysisError::DimensionMismatch {
            expected: phi.rows(),
            found: y.len(),
        });
    }
    let mut best: Option<L0Solution<T>> = None;
    for support in (0..n).combinations(k) {
        let sub = phi.matrix().select_columns(&support)?;
        let qr = match Householder::factor(&sub) {
            Ok(qr) => qr,
            Err(LinalgError::RankDeficient { .. }) | Err(LinalgError::Underdetermined { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let coefficients = qr.solve_vec(y)?;
        let fit = sub.matvec(&coefficients)?;
        let residual_norm = norm2(&crate::linalg::sub(y, &fit));
        if best.as_ref().is_none_or(|b| residual_norm < b.residual_norm) {
            best = Some(L0Solution {
                support,
                coefficients,
                residual_norm,
            });
        }
    }
    best.ok_or(AnalysisError::NoFeasibleSupport(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RicMethod {
    Exhaustive,
    RandomSupports,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicEstimate<T> {
    #[serde(rename = "K")]
    pub k: usize,
    /// Exact δ_K for exhaustive search, otherwise a lower bound.
    pub delta_lower: T,
    pub method: RicMethod,
    pub supports_checked: usize,
}

/// `max(λ_max − 1, 1 − λ_min)` of the Gram matrix of the given columns.
pub fn isometry_deviation<T: Scalar>(phi: &SensingMatrix<T>, support: &[usize]) -> Result<T> {
    let gram = phi.matrix().select_columns(support)?.gram();
    let ev = symmetric_eigenvalues(&gram)?;
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    Ok((hi - T::one()).max(T::one() - lo))
}

/// Restricted isometry constant of order `k`, exactly by enumerating every
/// support or as a lower bound from `budget` random supports. A sampling
/// budget that covers all supports falls back to enumeration.
pub fn estimate_ric<T: Scalar>(
    phi: &SensingMatrix<T>,
    k: usize,
    method: RicMethod,
    budget: usize,
    rng: &mut Rng,
) -> Result<RicEstimate<T>> {
    let n = phi.cols();
    if k == 0 || k > n {
        return Err(AnalysisError::SparsityOutOfRange { k, n });
    }
    let total = binomial(n, k);
    let enumerate = match method {
        RicMethod::Exhaustive => {
            guard_enumeration(n, k)?;
            true
        }
        RicMethod::RandomSupports => {
            if budget == 0 {
                return Err(AnalysisError::ZeroBudget);
            }
            budget as u128 >= total
        }
    };
    let mut delta = T::zero();
    let mut checked = 0usize;
    if enumerate {
        for support in (0..n).combinations(k) {
            delta = delta.max(isometry_deviation(phi, &support)?);
            checked += 1;
        }
    } else {
        for _ in 0..budget {
            let mut support = rand::seq::index::sample(rng, n, k).into_vec();
            support.sort_unstable();
            delta = delta.max(isometry_deviation(phi, &support)?);
            checked += 1;
        }
    }
    Ok(RicEstimate {
        k,
        delta_lower: delta,
        method,
        supports_checked: checked,
    })
}

/// Recovery threshold `√N / (√K + √N)` on `δ_{K+N}`.
pub fn gomp_condition_threshold(k: usize, n_atoms: usize) -> f64 {
    let (sk, sn) = ((k as f64).sqrt(), (n_atoms as f64).sqrt());
    sn / (sk + sn)
}

/// Whether `δ_{K+N} = delta` satisfies the gOMP exact-recovery condition
/// `δ_{K+N} < √N / (√K + √N)`.
pub fn check_gomp_condition<T: Scalar>(delta: T, k: usize, n_atoms: usize) -> bool {
    delta.to_f64_lossy() < gomp_condition_threshold(k, n_atoms)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationStatsReport {
    pub draws: usize,
    pub sigma2: f64,
    /// `φ_iᵀ y0`.
    pub expected_mean: Vec<f64>,
    /// `σ² ‖φ_i‖²`.
    pub expected_variance: Vec<f64>,
    pub empirical_mean: Vec<f64>,
    pub empirical_variance: Vec<f64>,
    /// Atoms whose empirical mean is within 4 standard errors.
    pub mean_pass_fraction: f64,
    /// Atoms whose empirical variance is within 10% of the prediction.
    pub variance_pass_fraction: f64,
    pub passed: bool,
}

/// Monte-Carlo check that the correlations `Φᵀ(y0 + ε)`, `ε ~ N(0, σ² I)`,
/// have per-atom mean `φ_iᵀ y0` and variance `σ² ‖φ_i‖²`.
pub fn verify_correlation_stats<T: Scalar>(
    phi: &SensingMatrix<T>,
    y0: &[T],
    sigma2: f64,
    draws: usize,
    rng: &mut Rng,
) -> Result<CorrelationStatsReport> {
    const MIN_DRAWS: usize = 1000;
    if draws < MIN_DRAWS {
        return Err(AnalysisError::TooFewDraws {
            min: MIN_DRAWS,
            got: draws,
        });
    }
    let (m, n) = (phi.rows(), phi.cols());
    if y0.len() != m {
        return Err(AnalysisError::DimensionMismatch {
            expected: m,
            found: y0.len(),
        });
    }
    let expected_mean: Vec<f64> = phi
        .matrix()
        .transpose_matvec(y0)?
        .iter()
        .map(|v| v.to_f64_lossy())
        .collect();
    let expected_variance: Vec<f64> = phi
        .col_norms()
        .iter()
        .map(|c| sigma2 * c.to_f64_lossy().powi(2))
        .collect();

    let sd = sigma2.sqrt();
    // Welford accumulators
    let mut mean = vec![0.0f64; n];
    let mut m2 = vec![0.0f64; n];
    let mut y = vec![T::zero(); m];
    for t in 0..draws {
        for (yi, &y0i) in y.iter_mut().zip(y0) {
            *yi = if sd == 0.0 {
                y0i
            } else {
                y0i + T::of(sd * rng.sample::<f64, _>(StandardNormal))
            };
        }
        let cr = phi.matrix().transpose_matvec(&y)?;
        let count = (t + 1) as f64;
        for ((mu, s2), c) in mean.iter_mut().zip(m2.iter_mut()).zip(&cr) {
            let c = c.to_f64_lossy();
            let delta = c - *mu;
            *mu += delta / count;
            *s2 += delta * (c - *mu);
        }
    }
    let empirical_variance: Vec<f64> = m2.iter().map(|s| s / (draws - 1) as f64).collect();

    let mean_ok = (0..n)
        .filter(|&i| {
            let stderr = (expected_variance[i] / draws as f64).sqrt();
            (mean[i] - expected_mean[i]).abs() <= 4.0 * stderr
        })
        .count();
    let var_ok = (0..n)
        .filter(|&i| (empirical_variance[i] - expected_variance[i]).abs() <= 0.1 * expected_variance[i])
        .count();
    let mean_pass_fraction = mean_ok as f64 / n as f64;
    let variance_pass_fraction = var_ok as f64 / n as f64;
    Ok(CorrelationStatsReport {
        draws,
        sigma2,
        expected_mean,
        expected_variance,
        empirical_mean: mean,
        empirical_variance,
        mean_pass_fraction,
        variance_pass_fraction,
        passed: mean_pass_fraction >= CORRELATION_PASS_FRACTION
            && variance_pass_fraction >= CORRELATION_PASS_FRACTION,
    })
}


#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkageRiskReport {
    pub draws: usize,
    /// Mean of `‖Cr − θ‖²` over the draws.
    pub mse_raw: f64,
    /// Mean of `‖Ĉr − θ‖²` over the draws.
    pub mse_shrunk: f64,
    /// Fraction of draws whose shrink factors were all positive.
    pub positive_fraction: f64,
}

/// Monte-Carlo risk of [`js_shrink`](crate::pursuit::js_shrink) against the
/// unshrunk observation for `Cr = θ + N(0, s I)`.
///
/// The shrinkage is driven through an identity dictionary with residual
/// variance `s` in every component, so each atom sees correlation-domain
/// variance exactly `s`.
pub fn shrinkage_risk(
    theta: &[f64],
    s: f64,
    p: usize,
    mode: crate::pursuit::VarianceMode,
    positive_part: bool,
    draws: usize,
    rng: &mut Rng,
) -> Result<ShrinkageRiskReport> {
    let d = theta.len();
    let phi: SensingMatrix<f64> = crate::linalg::Matrix::identity(d)?.into();
    let sigma2 = vec![s; d];
    let sd = s.sqrt();
    let (mut raw, mut shrunk, mut positive) = (0.0, 0.0, 0usize);
    let mut cr = vec![0.0; d];
    for _ in 0..draws {
        for (c, &t) in cr.iter_mut().zip(theta) {
            *c = t + sd * rng.sample::<f64, _>(StandardNormal);
        }
        let out = crate::pursuit::js_shrink(&cr, &sigma2, &phi, p, mode, positive_part)
            .map_err(|e| AnalysisError::Shrinkage(e.to_string()))?;
        if out.factors.iter().all(|f| *f > 0.0) {
            positive += 1;
        }
        raw += cr.iter().zip(theta).map(|(c, t)| (c - t).powi(2)).sum::<f64>();
        shrunk += out.values.iter().zip(theta).map(|(c, t)| (c - t).powi(2)).sum::<f64>();
    }
    let n = draws as f64;
    Ok(ShrinkageRiskReport {
        draws,
        mse_raw: raw / n,
        mse_shrunk: shrunk / n,
        positive_fraction: positive as f64 / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialMetrics {
    pub exact_recovery: bool,
    pub support_recall: f64,
    pub relative_l2_error: f64,
    /// `+∞` when the estimate is exact.
    pub psnr_db: f64,
    pub atom_count: usize,
    pub runtime_seconds: f64,
}

/// Relative magnitude below which an estimated coefficient is not counted
/// as an atom.
pub const ATOM_TOL: f64 = 1e-6;

/// Scores a recovery against the truth. A recovery is exact when the true
/// support is contained in the recovered one and the relative ℓ2 error is at
/// most `recovery_tol`. `runtime_seconds` is left at zero.
pub fn score_trial<T: Scalar>(
    truth: &SparseSignal<T>,
    result: &PursuitResult<T>,
    recovery_tol: f64,
) -> Result<TrialMetrics> {
    if result.x_hat.len() != truth.n() {
        return Err(AnalysisError::DimensionMismatch {
            expected: truth.n(),
            found: result.x_hat.len(),
        });
    }
    let x: Vec<f64> = truth.to_dense().iter().map(|v| v.to_f64_lossy()).collect();
    let x_hat: Vec<f64> = result.x_hat.iter().map(|v| v.to_f64_lossy()).collect();

    let hits = truth
        .support()
        .iter()
        .filter(|i| result.support.binary_search(i).is_ok())
        .count();
    let k = truth.sparsity();
    let support_recall = if k == 0 { 1.0 } else { hits as f64 / k as f64 };

    let err2: f64 = x.iter().zip(&x_hat).map(|(a, b)| (a - b).powi(2)).sum();
    let truth2: f64 = x.iter().map(|a| a * a).sum();
    let relative_l2_error = if truth2 == 0.0 {
        if err2 == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (err2 / truth2).sqrt()
    };

    let mse = err2 / x.len() as f64;
    let peak = x.iter().fold(0.0f64, |m, a| m.max(a * a));
    let psnr_db = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak / mse).log10()
    };

    let atom_tol = ATOM_TOL * x_hat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let atom_count = x_hat.iter().filter(|v| v.abs() > atom_tol).count();

    Ok(TrialMetrics {
        exact_recovery: hits == k && relative_l2_error <= recovery_tol,
        support_recall,
        relative_l2_error,
        psnr_db,
        atom_count,
        runtime_seconds: 0.0,
    })
}

/// `x_hat − x`, index by index.
pub fn error_trace<T: Scalar>(truth: &SparseSignal<T>, x_hat: &[T]) -> Vec<T> {
    truth
        .to_dense()
        .iter()
        .zip(x_hat)
        .map(|(&x, &xh)| xh - x)
        .collect()
}
