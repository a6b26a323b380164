//! Parallel replication runners with an in-order reduction.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dgp::simulate;
use super::{NullMode, Parameter, ScenarioConfig, ScenarioKind, Simulated};
use crate::desparsify::{desparsified_lasso, DesparsifyConfig};
use crate::error::{Error, Result};
use crate::hac::{default_bandwidth, HacEstimate, DEFAULT_DELTA_Q};
use crate::inference::{confidence_intervals, standard_errors, wald_test, Interval};
use crate::solver::{Criterion, LambdaChoice, SolverConfig};

/// 5% critical value of χ²₂.
pub const GRANGER_CRITICAL: f64 = 5.99;

/// Callback receiving `(finished, total)` replications.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    pub criterion: Criterion,
    pub nodewise_criterion: Criterion,
    pub alpha: f64,
    pub delta_q: f64,
    /// Fixed HAC bandwidth; `None` uses `default_bandwidth(T, delta_q)`.
    pub bandwidth: Option<usize>,
    pub solver: SolverConfig,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            criterion: Criterion::Bic,
            nodewise_criterion: Criterion::Bic,
            alpha: 0.05,
            delta_q: DEFAULT_DELTA_Q,
            bandwidth: None,
            solver: SolverConfig::default(),
        }
    }
}

impl ExperimentSettings {
    pub fn bandwidth_for(&self, t: usize) -> usize {
        self.bandwidth.unwrap_or_else(|| default_bandwidth(t, self.delta_q))
    }

    fn desparsify_config(&self) -> DesparsifyConfig {
        DesparsifyConfig {
            nodewise_lambda: LambdaChoice::Auto(self.nodewise_criterion),
            solver: self.solver.clone(),
        }
    }
}

/// Estimates for one replication, ordered as the requested targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub estimates: Vec<f64>,
    pub se: Vec<f64>,
    pub intervals: Vec<Interval>,
    /// `(b̂_j − β⁰_j)/se_j`.
    pub z: Vec<f64>,
    pub wald: Option<f64>,
    pub converged: bool,
}

/// Desparsified lasso with IC-selected penalties, HAC variances and, when the
/// sample carries a restriction, its Wald statistic.
pub fn estimate_replication(
    sim: &Simulated,
    targets: &[Parameter],
    settings: &ExperimentSettings,
) -> Result<ReplicationOutcome> {
    let h: Vec<usize> = targets.iter().map(|p| p.index).collect();
    let est = desparsified_lasso(
        &sim.data,
        LambdaChoice::Auto(settings.criterion),
        &h,
        &settings.desparsify_config(),
    )?;
    let hac = HacEstimate::from_estimate(&est, settings.bandwidth_for(sim.data.t()))?;
    let intervals = confidence_intervals(&est, &hac, settings.alpha)?;
    let se = standard_errors(&est, &hac)?;
    let z = targets
        .iter()
        .zip(est.b_h.iter().zip(&se))
        .map(|(p, (&b, &s))| (b - p.value) / s)
        .collect();
    let wald = match &sim.restriction {
        Some(r) if r.h.iter().all(|j| h.contains(j)) => Some(wald_test(&est, &hac, r)?.statistic),
        _ => None,
    };
    Ok(ReplicationOutcome {
        estimates: est.b_h.to_vec(),
        se: se.to_vec(),
        intervals,
        z,
        wald,
        converged: est.converged(),
    })
}

/// Runs `f` for every replication in parallel and returns results in
/// replication order.
pub fn replicate<R, F>(config: &ScenarioConfig, f: F, progress: Option<Progress<'_>>) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let done = AtomicUsize::new(0);
    let total = config.replications;
    (0..total)
        .into_par_iter()
        .map(|rep| {
            let out = f(rep);
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(p) = progress {
                p(k, total);
            }
            out
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub scenario: String,
    pub n: usize,
    pub t: usize,
    pub parameter: String,
    /// Share of included replications whose interval covers the true value.
    pub coverage: f64,
    pub mean_width: f64,
    pub replications: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionRow {
    pub scenario: String,
    pub n: usize,
    pub t: usize,
    pub mode: String,
    pub rejection_rate: f64,
    pub replications: usize,
    pub excluded: usize,
}

/// Flat row shared by the CSV and JSON outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub scenario: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "parameter/mode")]
    pub parameter_or_mode: String,
    pub value: f64,
    pub width_or_blank: Option<f64>,
    pub replications: usize,
    pub excluded: usize,
}

impl From<&CoverageRow> for TableRow {
    fn from(r: &CoverageRow) -> Self {
        Self {
            scenario: r.scenario.clone(),
            n: r.n,
            t: r.t,
            parameter_or_mode: r.parameter.clone(),
            value: r.coverage,
            width_or_blank: Some(r.mean_width),
            replications: r.replications,
            excluded: r.excluded,
        }
    }
}

impl From<&RejectionRow> for TableRow {
    fn from(r: &RejectionRow) -> Self {
        Self {
            scenario: r.scenario.clone(),
            n: r.n,
            t: r.t,
            parameter_or_mode: r.mode.clone(),
            value: r.rejection_rate,
            width_or_blank: None,
            replications: r.replications,
            excluded: r.excluded,
        }
    }
}

fn resolve_targets(config: &ScenarioConfig, names: &[String]) -> Result<Vec<Parameter>> {
    if names.is_empty() {
        return Err(Error::EmptyH);
    }
    let probe = simulate(config, 0)?;
    names.iter().map(|n| probe.parameter(n).cloned()).collect()
}

/// Keeps converged outcomes; failed or non-converged replications count as
/// excluded.
fn usable(outcome: Result<ReplicationOutcome>) -> Option<ReplicationOutcome> {
    outcome.ok().filter(|o| o.converged)
}

pub fn run_coverage_experiment(
    config: &ScenarioConfig,
    targets: &[String],
    settings: &ExperimentSettings,
) -> Result<Vec<CoverageRow>> {
    run_coverage_experiment_with_progress(config, targets, settings, None)
}

pub fn run_coverage_experiment_with_progress(
    config: &ScenarioConfig,
    targets: &[String],
    settings: &ExperimentSettings,
    progress: Option<Progress<'_>>,
) -> Result<Vec<CoverageRow>> {
    config.validate()?;
    if config.kind.is_var() {
        return Err(Error::InvalidConfig(
            "coverage experiments use the ARDL or factor designs".into(),
        ));
    }
    let params = resolve_targets(config, targets)?;
    let outcomes = replicate(
        config,
        |rep| usable(simulate(config, rep).and_then(|sim| estimate_replication(&sim, &params, settings))),
        progress,
    );
    let kept: Vec<&ReplicationOutcome> = outcomes.iter().flatten().collect();
    let excluded = config.replications - kept.len();
    Ok(params
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (mut covered, mut width) = (0usize, 0.0);
            for o in &kept {
                covered += usize::from(o.intervals[i].contains(p.value));
                width += o.intervals[i].width();
            }
            let m = kept.len() as f64;
            CoverageRow {
                scenario: config.kind.to_string(),
                n: config.n,
                t: config.t,
                parameter: p.name.clone(),
                coverage: covered as f64 / m,
                mean_width: width / m,
                replications: config.replications,
                excluded,
            }
        })
        .collect())
}

pub fn run_granger_experiment(config: &ScenarioConfig, settings: &ExperimentSettings) -> Result<RejectionRow> {
    run_granger_experiment_with_progress(config, settings, None)
}

pub fn run_granger_experiment_with_progress(
    config: &ScenarioConfig,
    settings: &ExperimentSettings,
    progress: Option<Progress<'_>>,
) -> Result<RejectionRow> {
    config.validate()?;
    let ScenarioKind::Var1(mode) = config.kind else {
        return Err(Error::InvalidConfig("Granger experiments need a VAR scenario".into()));
    };
    let outcomes = replicate(
        config,
        |rep| {
            let sim = simulate(config, rep)?;
            let restriction = sim.restriction.as_ref().expect("VAR samples carry a restriction");
            let params: Vec<Parameter> = restriction
                .h
                .iter()
                .map(|&j| {
                    sim.parameters
                        .iter()
                        .find(|p| p.index == j)
                        .cloned()
                        .expect("restricted parameter")
                })
                .collect();
            estimate_replication(&sim, &params, settings)
        },
        progress,
    );
    let stats: Vec<f64> = outcomes.into_iter().filter_map(usable).filter_map(|o| o.wald).collect();
    let rejections = stats.iter().filter(|&&w| w > GRANGER_CRITICAL).count();
    Ok(RejectionRow {
        scenario: config.kind.to_string(),
        n: config.n,
        t: config.t,
        mode: match mode {
            NullMode::Size => "size".into(),
            NullMode::Power => "power".into(),
        },
        rejection_rate: rejections as f64 / stats.len() as f64,
        replications: config.replications,
        excluded: config.replications - stats.len(),
    })
}
