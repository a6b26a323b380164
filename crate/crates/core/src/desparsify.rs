//! The desparsified lasso restricted to a set of inference targets.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nodewise::{build_theta, nodewise_fits, NodewiseSet};
pub use crate::solver::LambdaChoice;
use crate::solver::{gram_for, LassoFit, Problem, Response, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DesparsifyConfig {
    /// Penalty rule for every nodewise regression.
    pub nodewise_lambda: LambdaChoice,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesparsifiedEstimate {
    /// `b̂_H = β̂_H + Θ̂_H X'û/T`, ordered as `h`.
    pub b_h: Array1<f64>,
    pub beta_init: LassoFit,
    pub nodewise: NodewiseSet,
    pub h: Vec<usize>,
}

impl DesparsifiedEstimate {
    pub fn t(&self) -> usize {
        self.beta_init.residuals.len()
    }

    /// True when the initial and every nodewise fit converged.
    pub fn converged(&self) -> bool {
        self.beta_init.converged && self.nodewise.fits.iter().all(|f| f.converged)
    }
}

/// Initial lasso, nodewise regressions for `h`, and the one-step correction.
///
/// The initial fit and the nodewise fits share one Gram matrix when the
/// design is moderate in size.
pub fn desparsified_lasso(
    data: &Dataset,
    lambda: LambdaChoice,
    h: &[usize],
    config: &DesparsifyConfig,
) -> Result<DesparsifiedEstimate> {
    config.solver.validate()?;
    if config.solver.standardize {
        return Err(Error::InvalidConfig(
            "standardization is not supported for the desparsified lasso".into(),
        ));
    }
    if h.is_empty() {
        return Err(Error::EmptyH);
    }
    if let Some(&j) = h.iter().find(|&&j| j >= data.n()) {
        return Err(Error::IndexOutOfRange { index: j, n: data.n() });
    }
    let gram = gram_for(data, &config.solver);
    let beta_init =
        Problem::new(data, gram.as_ref(), Response::Y, (0..data.n()).collect()).solve(lambda, &config.solver)?;
    let fits = nodewise_fits(data, gram.as_ref(), h, config.nodewise_lambda, &config.solver)?;
    let nodewise = build_theta(fits, h, data.n())?;
    let b_h = correct(data, &beta_init, &nodewise);
    Ok(DesparsifiedEstimate {
        b_h,
        beta_init,
        nodewise,
        h: h.to_vec(),
    })
}

fn correct(data: &Dataset, fit: &LassoFit, nodewise: &NodewiseSet) -> Array1<f64> {
    let score = data.xt_times(fit.residuals.as_slice().expect("contiguous"));
    let correction = nodewise.theta_rows.dot(&score);
    nodewise
        .h
        .iter()
        .zip(correction.iter())
        .map(|(&j, c)| fit.beta[j] + c)
        .collect()
}

/// Simulation-only diagnostics that need the true coefficient vector.
pub mod oracle {
    use super::*;

    /// `Δ_j = √T (e_j' − Θ̂_jΣ̂)(β̂ − β⁰)` for each target.
    pub fn delta_bias(estimate: &DesparsifiedEstimate, beta_true: &Array1<f64>, data: &Dataset) -> Result<Array1<f64>> {
        let n = data.n();
        if beta_true.len() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("beta of length {n}"),
                got: format!("length {}", beta_true.len()),
            });
        }
        let diff = &estimate.beta_init.beta - beta_true;
        let xd = data.x_times(diff.as_slice().expect("contiguous"));
        let sd = data.xt_times(xd.as_slice().expect("contiguous"));
        let sqrt_t = (data.t() as f64).sqrt();
        Ok(estimate
            .h
            .iter()
            .zip(estimate.nodewise.theta_rows.rows())
            .map(|(&j, row)| sqrt_t * (diff[j] - row.dot(&sd)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::delta_bias;
    use super::*;
    use crate::solver::Criterion;
    use crate::testutil::{ols, random_dataset, rng};

    fn exact_cfg() -> DesparsifyConfig {
        DesparsifyConfig {
            nodewise_lambda: LambdaChoice::Fixed(0.0),
            solver: SolverConfig {
                tol: 1e-13,
                max_iter: 200_000,
                ..Default::default()
            },
        }
    }

    #[test]
    fn exact_inverse_gives_ols_for_any_lambda() {
        let mut r = rng(1);
        let d = random_dataset(&mut r, 90, 7);
        let b = ols(d.x(), d.y());
        let h = [0, 2, 6];
        for lambda in [0.0, 0.05, 0.5, 10.0] {
            let est = desparsified_lasso(&d, LambdaChoice::Fixed(lambda), &h, &exact_cfg()).unwrap();
            for (i, &j) in h.iter().enumerate() {
                assert!(
                    (est.b_h[i] - b[j]).abs() < 1e-8,
                    "lambda {lambda}: {} vs {}",
                    est.b_h[i],
                    b[j]
                );
            }
            let delta = delta_bias(&est, &b, &d).unwrap();
            assert!(delta.iter().all(|v| v.abs() < 1e-6));
        }
    }

    #[test]
    fn recomputable_from_components() {
        let mut r = rng(2);
        let d = random_dataset(&mut r, 60, 30);
        let cfg = DesparsifyConfig::default();
        let est = desparsified_lasso(&d, LambdaChoice::Auto(Criterion::Bic), &[0, 4], &cfg).unwrap();
        let u = d.y() - &d.x().dot(&est.beta_init.beta);
        let score = d.x().t().dot(&u) / 60.0;
        for (i, &j) in est.h.iter().enumerate() {
            let direct = est.beta_init.beta[j] + est.nodewise.theta_rows.row(i).dot(&score);
            assert!((direct - est.b_h[i]).abs() <= 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn permuting_targets_permutes_estimates() {
        let mut r = rng(3);
        let d = random_dataset(&mut r, 50, 20);
        let cfg = DesparsifyConfig::default();
        let a = desparsified_lasso(&d, LambdaChoice::Fixed(0.05), &[1, 5, 9], &cfg).unwrap();
        let b = desparsified_lasso(&d, LambdaChoice::Fixed(0.05), &[9, 1, 5], &cfg).unwrap();
        assert_eq!(a.b_h[0], b.b_h[1]);
        assert_eq!(a.b_h[1], b.b_h[2]);
        assert_eq!(a.b_h[2], b.b_h[0]);
    }

    #[test]
    fn delta_vanishes_at_truth() {
        let mut r = rng(4);
        let d = random_dataset(&mut r, 50, 20);
        let est = desparsified_lasso(&d, LambdaChoice::Fixed(0.1), &[0, 1], &DesparsifyConfig::default()).unwrap();
        let delta = delta_bias(&est, &est.beta_init.beta.clone(), &d).unwrap();
        assert!(delta.iter().all(|&v| v == 0.0));
        assert!(delta_bias(&est, &Array1::zeros(3), &d).is_err());
    }

    #[test]
    fn input_validation() {
        let mut r = rng(5);
        let d = random_dataset(&mut r, 30, 5);
        let cfg = DesparsifyConfig::default();
        assert_eq!(
            desparsified_lasso(&d, LambdaChoice::Fixed(0.1), &[], &cfg).unwrap_err(),
            Error::EmptyH
        );
        assert!(desparsified_lasso(&d, LambdaChoice::Fixed(0.1), &[5], &cfg).is_err());
    }
}
