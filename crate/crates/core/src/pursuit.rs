//! Greedy pursuit solvers.
//!
//! OMP, gOMP and JS-gOMP share one loop: identify the atoms most correlated
//! with the residual, append them to the support, refit by least squares on
//! the support and recompute the residual. They differ only in how atoms are
//! identified:
//!
//! * gOMP takes the `N` largest `|Φᵀr|`; OMP is gOMP with `N = 1`.
//! * JS-gOMP works on an ensemble of `p` noisy measurements. It correlates
//!   the atoms with the ensemble-mean residual and shrinks every correlation
//!   towards zero by a James-Stein factor built from the per-component sample
//!   variance of the residual ensemble before ranking them.

use thiserror::Error;

use crate::linalg::{norm2, Householder, LinalgError, Matrix};
use crate::problem::{MeasurementEnsemble, SensingMatrix};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PursuitError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{op}: dimension mismatch, expected {expected}, got {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("cannot select {wanted} atoms, only {available} candidates remain")]
    NotEnoughCandidates { wanted: usize, available: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T, E = PursuitError> = std::result::Result<T, E>;

/// How the per-component residual variance is carried into the correlation
/// domain before shrinking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceMode {
    /// `s_i = mean(σ̂²) ‖φ_i‖²`.
    ScalarMean,
    /// `s_i = Σ_j φ_ji² σ̂²_j`, the variance of `φ_iᵀε` for independent
    /// heteroscedastic noise components.
    #[default]
    PerAtomQuadratic,
}

/// Norm of the residual ensemble compared against the halting threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HaltNorm {
    /// ℓ2 norm of the ensemble-mean residual.
    #[default]
    MeanResidual,
    /// Frobenius norm of the residual ensemble divided by `√p`.
    FrobeniusScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HaltTol<T> {
    Absolute(T),
    /// Multiple of the ℓ2 norm of the (mean) measurement.
    Relative(T),
}

impl<T: Scalar> Default for HaltTol<T> {
    fn default() -> Self {
        HaltTol::Relative(T::of(1e-6))
    }
}

impl<T: Scalar> HaltTol<T> {
    fn resolve(self, measurement_norm: T) -> T {
        match self {
            HaltTol::Absolute(t) => t,
            HaltTol::Relative(f) => f * measurement_norm,
        }
    }

    fn value(self) -> T {
        match self {
            HaltTol::Absolute(t) | HaltTol::Relative(t) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct JsOptions {
    pub variance_mode: VarianceMode,
    /// Clip negative shrink factors at zero.
    pub positive_part: bool,
    /// Rank atoms by the unshrunk correlations (the shrinkage is still
    /// computed but does not influence selection).
    pub select_raw: bool,
    pub halt_norm: HaltNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PursuitConfig<T> {
    /// Atoms added per iteration (`N`).
    pub atoms_per_iter: usize,
    /// Target sparsity (`K`).
    pub sparsity: usize,
    pub halt_tol: HaltTol<T>,
    /// Replaces the default iteration cap `min{K, m/N}`.
    pub max_iter_override: Option<usize>,
    pub js: JsOptions,
}

impl<T: Scalar> PursuitConfig<T> {
    pub fn new(atoms_per_iter: usize, sparsity: usize) -> Self {
        Self {
            atoms_per_iter,
            sparsity,
            halt_tol: HaltTol::default(),
            max_iter_override: None,
            js: JsOptions::default(),
        }
    }

    pub fn with_js(mut self, js: JsOptions) -> Self {
        self.js = js;
        self
    }

    pub fn with_halt_tol(mut self, halt_tol: HaltTol<T>) -> Self {
        self.halt_tol = halt_tol;
        self
    }

    /// Checks `1 <= N <= min{K, m/K}` and a non-negative threshold.
    pub fn validate(&self, m: usize) -> Result<()> {
        let (n_atoms, k) = (self.atoms_per_iter, self.sparsity);
        if n_atoms == 0 {
            return Err(PursuitError::Config("N must be at least 1".into()));
        }
        if k == 0 {
            return Err(PursuitError::Config("K must be at least 1".into()));
        }
        if n_atoms > k {
            return Err(PursuitError::Config(format!("N={n_atoms} exceeds K={k}")));
        }
        if n_atoms * k > m {
            return Err(PursuitError::Config(format!(
                "N={n_atoms} exceeds m/K={m}/{k}"
            )));
        }
        let tol = self.halt_tol.value();
        if !(tol >= T::zero()) || !tol.is_finite() {
            return Err(PursuitError::Config(format!(
                "halting threshold must be finite and non-negative, got {tol}"
            )));
        }
        Ok(())
    }

    /// Number of iterations allowed for `m` measurements.
    fn iteration_cap(&self, m: usize) -> usize {
        self.max_iter_override.unwrap_or_else(|| {
            // k < min{K, m/N} over integers k
            let by_rows = m.div_ceil(self.atoms_per_iter);
            self.sparsity.min(by_rows)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HaltReason {
    ResidualBelowTol,
    IterationCap,
    RankDeficient,
}

impl HaltReason {
    pub fn as_str(self) -> &'static str {
        match self {
            HaltReason::ResidualBelowTol => "residual_below_tol",
            HaltReason::IterationCap => "iteration_cap",
            HaltReason::RankDeficient => "rank_deficient",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PursuitResult<T> {
    /// Selected atoms, ascending.
    pub support: Vec<usize>,
    /// Selected atoms in the order they were identified.
    pub selection_order: Vec<usize>,
    /// Dense estimate, zero off the support.
    pub x_hat: Vec<T>,
    /// Every residual norm compared against the halting threshold.
    pub residual_norm_trace: Vec<T>,
    pub iterations: usize,
    pub halt_reason: HaltReason,
}

/// `Φᵀ v`.
pub fn correlate<T: Scalar>(phi: &SensingMatrix<T>, v: &[T]) -> Result<Vec<T>> {
    Ok(phi.matrix().transpose_matvec(v)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shrinkage<T> {
    pub values: Vec<T>,
    /// Per-atom factor applied, `1 − (p−2) s_i / ‖Cr‖²` (clipped if requested).
    pub factors: Vec<T>,
    /// Set when `‖Cr‖ = 0`; `values` is then the input unchanged.
    pub degenerate: bool,
}

/// James-Stein shrinkage of a correlation vector:
/// `Ĉr_i = (1 − (p−2) s_i / ‖Cr‖²) Cr_i`, where `s_i` is the correlation-domain
/// variance of atom `i` derived from the residual variance `sigma2_res`.
pub fn js_shrink<T: Scalar>(
    cr: &[T],
    sigma2_res: &[T],
    phi: &SensingMatrix<T>,
    p: usize,
    mode: VarianceMode,
    positive_part: bool,
) -> Result<Shrinkage<T>> {
    if p < 3 {
        return Err(PursuitError::Config(format!(
            "James-Stein shrinkage needs an ensemble of p >= 3, got {p}"
        )));
    }
    if cr.len() != phi.cols() {
        return Err(PursuitError::DimensionMismatch {
            op: "js_shrink correlations",
            expected: phi.cols(),
            found: cr.len(),
        });
    }
    if sigma2_res.len() != phi.rows() {
        return Err(PursuitError::DimensionMismatch {
            op: "js_shrink variances",
            expected: phi.rows(),
            found: sigma2_res.len(),
        });
    }
    let energy = cr.iter().fold(T::zero(), |acc, &c| acc + c * c);
    if energy == T::zero() {
        return Ok(Shrinkage {
            values: cr.to_vec(),
            factors: vec![T::one(); cr.len()],
            degenerate: true,
        });
    }
    let gain = T::of((p - 2) as f64) / energy;
    let scalar = match mode {
        VarianceMode::ScalarMean => {
            sigma2_res.iter().copied().sum::<T>() / T::of(sigma2_res.len() as f64)
        }
        VarianceMode::PerAtomQuadratic => T::zero(),
    };
    let mut factors = Vec::with_capacity(cr.len());
    let mut values = Vec::with_capacity(cr.len());
    for (i, &c) in cr.iter().enumerate() {
        let s = match mode {
            VarianceMode::ScalarMean => {
                let norm = phi.col_norms()[i];
                scalar * norm * norm
            }
            VarianceMode::PerAtomQuadratic => phi
                .atom(i)
                .iter()
                .zip(sigma2_res)
                .fold(T::zero(), |acc, (&a, &v)| acc + a * a * v),
        };
        let mut f = T::one() - gain * s;
        if positive_part && f < T::zero() {
            f = T::zero();
        }
        factors.push(f);
        values.push(f * c);
    }
    Ok(Shrinkage {
        values,
        factors,
        degenerate: false,
    })
}

/// Indices of the `n_atoms` largest `|cr_i|` outside `exclude`, in descending
/// magnitude. Ties go to the smaller index.
pub fn identify_top_n<T: Scalar>(cr: &[T], n_atoms: usize, exclude: &[usize]) -> Result<Vec<usize>> {
    if n_atoms == 0 {
        return Err(PursuitError::Config("N must be at least 1".into()));
    }
    let mut excluded = vec![false; cr.len()];
    for &i in exclude {
        if let Some(e) = excluded.get_mut(i) {
            *e = true;
        }
    }
    let mut candidates: Vec<(usize, T)> = cr
        .iter()
        .enumerate()
        .filter(|(i, _)| !excluded[*i])
        .map(|(i, c)| (i, c.abs()))
        .collect();
    if candidates.len() < n_atoms {
        return Err(PursuitError::NotEnoughCandidates {
            wanted: n_atoms,
            available: candidates.len(),
        });
    }
    let order = |a: &(usize, T), b: &(usize, T)| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    };
    if candidates.len() > n_atoms {
        candidates.select_nth_unstable_by(n_atoms - 1, order);
        candidates.truncate(n_atoms);
    }
    candidates.sort_by(order);
    Ok(candidates.into_iter().map(|(i, _)| i).collect())
}

/// Residual bookkeeping shared by the solvers.
///
/// `residual` has one column for a single measurement and `p` columns for an
/// ensemble; the fit `Φ_Λ u` is subtracted from every column.
struct EnsembleState<T> {
    measurements: Matrix<T>,
    residual: Matrix<T>,
    mean: Vec<T>,
    variance: Vec<T>,
}

impl<T: Scalar> EnsembleState<T> {
    fn new(measurements: Matrix<T>) -> Self {
        let mut state = Self {
            residual: measurements.clone(),
            measurements,
            mean: Vec::new(),
            variance: Vec::new(),
        };
        state.estimate();
        state
    }

    fn p(&self) -> usize {
        self.measurements.cols()
    }

    /// Row-wise mean and unbiased variance of the residual ensemble.
    fn estimate(&mut self) {
        self.mean = self.residual.column_mean();
        let p = self.p();
        self.variance = if p < 2 {
            vec![T::zero(); self.mean.len()]
        } else {
            let denom = T::of((p - 1) as f64);
            (0..self.residual.rows())
                .map(|i| {
                    let mu = self.mean[i];
                    (0..p)
                        .map(|j| {
                            let d = self.residual.get(i, j) - mu;
                            d * d
                        })
                        .sum::<T>()
                        / denom
                })
                .collect()
        };
    }

    fn update(&mut self, fit: &[T]) {
        for j in 0..self.p() {
            let (y, r) = (self.measurements.col(j), self.residual.col_mut(j));
            for ((ri, &yi), &fi) in r.iter_mut().zip(y).zip(fit) {
                *ri = yi - fi;
            }
        }
        self.estimate();
    }

    fn halt_norm(&self, kind: HaltNorm) -> T {
        match kind {
            HaltNorm::MeanResidual => norm2(&self.mean),
            HaltNorm::FrobeniusScaled => {
                self.residual.frobenius_norm() / T::of(self.p() as f64).sqrt()
            }
        }
    }
}

/// Least-squares fit on the support. With an ensemble the coefficient vector
/// is shared across columns, so the optimum is the fit to the ensemble mean.
fn fit_support<T: Scalar>(phi: &SensingMatrix<T>, support: &[usize], target: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let sub = phi.matrix().select_columns(support)?;
    let coef = Householder::factor(&sub)?.solve_vec(target)?;
    let fit = sub.matvec(&coef)?;
    Ok((coef, fit))
}

fn scatter<T: Scalar>(n: usize, support: &[usize], coef: &[T]) -> Vec<T> {
    let mut x = vec![T::zero(); n];
    for (&i, &c) in support.iter().zip(coef) {
        x[i] = c;
    }
    x
}

fn pursue<T: Scalar>(
    phi: &SensingMatrix<T>,
    measurements: Matrix<T>,
    cfg: &PursuitConfig<T>,
    mut identify: impl FnMut(&EnsembleState<T>, &[usize]) -> Result<Vec<usize>>,
) -> Result<PursuitResult<T>> {
    let (m, n) = (phi.rows(), phi.cols());
    cfg.validate(m)?;
    if measurements.rows() != m {
        return Err(PursuitError::DimensionMismatch {
            op: "pursuit measurements",
            expected: m,
            found: measurements.rows(),
        });
    }

    let target = measurements.column_mean();
    let halt_tol = cfg.halt_tol.resolve(norm2(&target));
    let cap = cfg.iteration_cap(m);
    let mut state = EnsembleState::new(measurements);

    let mut order: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    let mut k = 0usize;

    let halt_reason = loop {
        let r_norm = state.halt_norm(cfg.js.halt_norm);
        trace.push(r_norm);
        if r_norm <= halt_tol {
            break HaltReason::ResidualBelowTol;
        }
        if k >= cap || order.len() + cfg.atoms_per_iter > m {
            break HaltReason::IterationCap;
        }
        let picked = identify(&state, &order)?;
        let mut candidate = order.clone();
        candidate.extend_from_slice(&picked);
        let (_, fit) = match fit_support(phi, &candidate, &target) {
            Ok(v) => v,
            Err(PursuitError::Linalg(LinalgError::RankDeficient { .. })) => {
                break HaltReason::RankDeficient;
            }
            Err(e) => return Err(e),
        };
        order = candidate;
        state.update(&fit);
        k += 1;
    };

    // final estimate on the selected support
    let x_hat = if order.is_empty() {
        vec![T::zero(); n]
    } else {
        let (coef, _) = fit_support(phi, &order, &target)?;
        scatter(n, &order, &coef)
    };
    let mut support = order.clone();
    support.sort_unstable();
    Ok(PursuitResult {
        support,
        selection_order: order,
        x_hat,
        residual_norm_trace: trace,
        iterations: k,
        halt_reason,
    })
}

/// Generalized OMP: `N = cfg.atoms_per_iter` atoms per iteration.
pub fn gomp<T: Scalar>(phi: &SensingMatrix<T>, y: &[T], cfg: &PursuitConfig<T>) -> Result<PursuitResult<T>> {
    if y.len() != phi.rows() {
        return Err(PursuitError::DimensionMismatch {
            op: "gomp measurement",
            expected: phi.rows(),
            found: y.len(),
        });
    }
    let measurements = Matrix::from_col_major(y.len(), 1, y.to_vec())?;
    let n_atoms = cfg.atoms_per_iter;
    pursue(phi, measurements, cfg, |state, support| {
        let cr = correlate(phi, &state.mean)?;
        identify_top_n(&cr, n_atoms, support)
    })
}

/// Orthogonal matching pursuit, i.e. [`gomp`] with one atom per iteration.
pub fn omp<T: Scalar>(phi: &SensingMatrix<T>, y: &[T], cfg: &PursuitConfig<T>) -> Result<PursuitResult<T>> {
    let cfg = PursuitConfig {
        atoms_per_iter: 1,
        ..cfg.clone()
    };
    gomp(phi, y, &cfg)
}

/// gOMP over a measurement ensemble with James-Stein shrinkage of the
/// correlations. Requires `p >= 3`.
pub fn js_gomp<T: Scalar>(
    phi: &SensingMatrix<T>,
    ens: &MeasurementEnsemble<T>,
    cfg: &PursuitConfig<T>,
) -> Result<PursuitResult<T>> {
    let p = ens.p();
    if p < 3 {
        return Err(PursuitError::Config(format!(
            "JS-gOMP needs an ensemble of p >= 3, got {p}"
        )));
    }
    let n_atoms = cfg.atoms_per_iter;
    let js = cfg.js;
    pursue(phi, ens.y.clone(), cfg, |state, support| {
        let cr = correlate(phi, &state.mean)?;
        let shrunk = js_shrink(&cr, &state.variance, phi, p, js.variance_mode, js.positive_part)?;
        let ranking = if js.select_raw { &cr } else { &shrunk.values };
        identify_top_n(ranking, n_atoms, support)
    })
}
