//! Data-generating processes and Monte Carlo runners for the coverage and
//! Granger-causality experiments.
//!
//! Each replication draws from its own ChaCha8 stream (`seed`, stream = rep),
//! so tables do not depend on how replications are scheduled across threads.

mod dgp;
mod experiment;

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::Restriction;

pub use dgp::{
    ardl_coefficients, block_constant, factor_loadings, simulate, simulate_ardl, simulate_factor,
    simulate_factor_with_loadings, simulate_var1, var1_matrix, Garch, A1_ENTRY, A4_ENTRY, BLOCK, FACTOR_AR,
    GARCH_ALPHA, GARCH_BETA, GARCH_H0, GARCH_OMEGA, RHO_ARDL, RHO_VAR,
};
pub use experiment::{
    estimate_replication, replicate, run_coverage_experiment, run_coverage_experiment_with_progress,
    run_granger_experiment, run_granger_experiment_with_progress, CoverageRow, ExperimentSettings, Progress,
    RejectionRow, ReplicationOutcome, TableRow, GRANGER_CRITICAL,
};

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_BURN_IN: usize = 200;
pub const DEFAULT_REPLICATIONS: usize = 10_000;
/// Stream reserved for draws made once per experiment (factor loadings).
pub const EXPERIMENT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorLaw {
    Iid,
    Garch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NullMode {
    /// `A₁^{(1,2)} = 0`.
    Size,
    /// `A₁^{(1,2)} = −ρ²`.
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    ArdlBlockDiag(ErrorLaw),
    Factor,
    Var1(NullMode),
}

impl ScenarioKind {
    pub fn is_var(&self) -> bool {
        matches!(self, ScenarioKind::Var1(_))
    }

    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::ArdlBlockDiag(ErrorLaw::Iid),
        ScenarioKind::ArdlBlockDiag(ErrorLaw::Garch),
        ScenarioKind::Factor,
        ScenarioKind::Var1(NullMode::Size),
        ScenarioKind::Var1(NullMode::Power),
    ];
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::ArdlBlockDiag(ErrorLaw::Iid) => "ardl-iid",
            ScenarioKind::ArdlBlockDiag(ErrorLaw::Garch) => "ardl-garch",
            ScenarioKind::Factor => "factor",
            ScenarioKind::Var1(NullMode::Size) => "var-size",
            ScenarioKind::Var1(NullMode::Power) => "var-power",
        })
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub n: usize,
    pub t: usize,
    pub replications: usize,
    pub seed: u64,
    pub burn_in: usize,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind, n: usize, t: usize) -> Self {
        Self {
            kind,
            n,
            t,
            replications: DEFAULT_REPLICATIONS,
            seed: DEFAULT_SEED,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be at least 1".into()));
        }
        if self.t < 10 {
            return Err(Error::InvalidConfig(format!("T must be at least 10, got {}", self.t)));
        }
        match self.kind {
            ScenarioKind::ArdlBlockDiag(_) => {
                if self.n < 6 || !(self.n - 1).is_multiple_of(5) {
                    return Err(Error::BadDimension(format!(
                        "ARDL design needs N - 1 to be a positive multiple of 5, got N = {}",
                        self.n
                    )));
                }
            }
            ScenarioKind::Factor => {
                if self.n < 2 {
                    return Err(Error::BadDimension(format!(
                        "factor design needs N >= 2, got {}",
                        self.n
                    )));
                }
            }
            ScenarioKind::Var1(_) => {
                if !self.n.is_multiple_of(2) || self.n < 4 {
                    return Err(Error::BadDimension(format!(
                        "VAR design needs an even N >= 4, got {}",
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }

    /// Generator for replication `rep`.
    pub fn rng(&self, rep: usize) -> ChaCha8Rng {
        stream(self.seed, rep as u64)
    }
}

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Number of nonzero slope coefficients for dimension `n`.
pub fn sparsity(n: usize) -> usize {
    if n < 501 {
        5
    } else {
        10
    }
}

/// A named coefficient with its column and true value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub index: usize,
    pub value: f64,
}

/// One simulated sample with everything needed to score an estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub data: Dataset,
    /// True coefficients on the columns of `data.x`.
    pub beta: Array1<f64>,
    /// Innovations of the `y` equation, aligned with `data.y`.
    pub u: Array1<f64>,
    pub parameters: Vec<Parameter>,
    pub restriction: Option<Restriction>,
}

impl Simulated {
    pub fn parameter(&self, name: &str) -> Result<&Parameter> {
        self.parameters
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown parameter '{name}'")))
    }
}

/// Parameters reported by default for a scenario.
pub fn default_targets(kind: ScenarioKind) -> Vec<String> {
    match kind {
        ScenarioKind::ArdlBlockDiag(_) => vec!["rho".into(), "beta1".into()],
        ScenarioKind::Factor => vec!["beta1".into()],
        ScenarioKind::Var1(_) => vec![],
    }
}
