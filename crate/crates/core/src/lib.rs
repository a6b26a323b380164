//! Lasso, nodewise regressions, the desparsified lasso and Bartlett-kernel
//! long-run variance estimation for inference in high-dimensional linear
//! time-series regressions, plus the simulation designs used to check
//! coverage and test size.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod desparsify;
pub mod diagnostics;
pub mod error;
pub mod hac;
pub mod inference;
pub mod linalg;
pub mod nodewise;
pub mod simulate;
pub mod solver;
pub mod stats;

#[cfg(test)]
mod testutil;

pub use data::Dataset;
pub use desparsify::{desparsified_lasso, DesparsifiedEstimate, DesparsifyConfig, LambdaChoice};
pub use diagnostics::{
    compatibility_constant, covariance_closeness, error_decay_study, sparsity_index_set, weak_sparsity_norm,
    CompatibilityMethod, DecayMetric,
};
pub use error::{Error, Result};
pub use hac::{bartlett_lrv, default_bandwidth, lag_cov, sandwich_psi, score_products, HacEstimate, ScoreMatrix};
pub use inference::{confidence_intervals, infer, wald_test, z_statistics, InferenceReport, Interval, Restriction};
pub use nodewise::{build_theta, fit_nodewise, kkt_certificate, population_nodewise, NodewiseFit, NodewiseSet};
pub use simulate::{run_coverage_experiment, run_granger_experiment, ExperimentSettings, ScenarioConfig, ScenarioKind};
pub use solver::{
    fit_auto, fit_lasso, fit_path, lambda_grid, select_by_ic, soft_threshold, Criterion, LassoFit, SolverConfig,
};
