//! Greedy sparse recovery: orthogonal matching pursuit (OMP), generalized
//! OMP (gOMP) and an ensemble variant of gOMP that denoises the correlation
//! step with a James-Stein shrinkage estimator (JS-gOMP).
//!
//! The crate also contains the random problem generators used for
//! benchmarking and a set of ground-truth oracles (exhaustive ℓ0 search,
//! restricted isometry constant estimation, correlation statistics).
//!
//! All numerical code is generic over [`Scalar`]; the `*64`/`*32` aliases
//! below name the common instantiations.

pub mod analysis;
pub mod linalg;
pub mod problem;
pub mod pursuit;
mod scalar;
pub mod seed;

pub use analysis::{
    binomial, check_gomp_condition, error_trace, estimate_ric, gomp_condition_threshold, l0_oracle,
    score_trial, shrinkage_risk, verify_correlation_stats,
    AnalysisError, CorrelationStatsReport, L0Solution, RicEstimate, RicMethod, ShrinkageRiskReport,
    TrialMetrics,
};
pub use linalg::{lstsq, symmetric_eigenvalues, Householder, LinalgError, Matrix};
pub use problem::{
    gen_ensemble, gen_sensing_matrix, gen_sparse_signal, InstanceDoc, MeasurementEnsemble,
    ProblemError, ProblemInstance, SensingMatrix, SparseSignal,
};
pub use pursuit::{
    correlate, gomp, identify_top_n, js_gomp, js_shrink, omp, HaltNorm, HaltReason, HaltTol,
    JsOptions, PursuitConfig, PursuitError, PursuitResult, Shrinkage, VarianceMode,
};
pub use scalar::Scalar;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type SensingMatrix64 = SensingMatrix<f64>;
pub type SensingMatrix32 = SensingMatrix<f32>;
pub type SparseSignal64 = SparseSignal<f64>;
pub type SparseSignal32 = SparseSignal<f32>;
pub type ProblemInstance64 = ProblemInstance<f64>;
pub type ProblemInstance32 = ProblemInstance<f32>;
pub type PursuitConfig64 = PursuitConfig<f64>;
pub type PursuitResult64 = PursuitResult<f64>;
pub type PursuitResult32 = PursuitResult<f32>;
