//! Nodewise lasso regressions and the relaxed inverse Θ̂ restricted to the
//! inference targets.
//!
//! For each target column `j` the column is regressed on all other columns;
//! the row `Θ̂_j = (1/τ̂_j²)·[1, −γ̂_j']` (with the `1` at position `j`)
//! approximately inverts `Σ̂ = X'X/T`. Only rows for the targets are formed.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, Cholesky};
use crate::solver::{gram_for, LambdaChoice, Problem, Response, SolverConfig};

/// Floor applied to τ̂² before any division.
pub const TAU_SQ_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodewiseFit {
    /// Target column (0-based).
    pub j: usize,
    /// Coefficients on the other columns, in column order with `j` skipped.
    pub gamma: Array1<f64>,
    pub lambda_j: f64,
    /// `‖v̂_j‖²/T + 2λ_j‖γ̂_j‖₁`, floored at [`TAU_SQ_FLOOR`].
    pub tau_sq: f64,
    /// `x_j − X₋ⱼγ̂_j`.
    pub v_hat: Array1<f64>,
    /// Set when the floor replaced the computed τ̂².
    pub tau_floored: bool,
    pub converged: bool,
}

impl NodewiseFit {
    /// Coefficient on column `k` (zero at `k == j`).
    pub fn gamma_at(&self, k: usize) -> f64 {
        match k.cmp(&self.j) {
            std::cmp::Ordering::Less => self.gamma[k],
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => self.gamma[k - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodewiseSet {
    pub h: Vec<usize>,
    pub fits: Vec<NodewiseFit>,
    /// h×N rows of Θ̂ in the order of `h`.
    pub theta_rows: Array2<f64>,
}

impl NodewiseSet {
    pub fn tau_sq(&self) -> Array1<f64> {
        self.fits.iter().map(|f| f.tau_sq).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.fits.iter().map(|f| f.lambda_j).collect()
    }
}

fn nodewise_problem<'a>(data: &'a Dataset, gram: Option<&'a Array2<f64>>, j: usize) -> Result<Problem<'a>> {
    let n = data.n();
    if n < 2 {
        return Err(Error::InvalidData("nodewise regressions need N >= 2".into()));
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let cols = (0..n).filter(|&k| k != j).collect();
    Ok(Problem::new(data, gram, Response::Column(j), cols))
}

fn finish(j: usize, fit: crate::solver::LassoFit) -> NodewiseFit {
    let t = fit.residuals.len() as f64;
    let l1: f64 = fit.beta.iter().map(|g| g.abs()).sum();
    let raw = fit.residuals.dot(&fit.residuals) / t + 2.0 * fit.lambda * l1;
    let tau_floored = !(raw > TAU_SQ_FLOOR);
    NodewiseFit {
        j,
        gamma: fit.beta,
        lambda_j: fit.lambda,
        tau_sq: if tau_floored { TAU_SQ_FLOOR } else { raw },
        v_hat: fit.residuals,
        tau_floored,
        converged: fit.converged,
    }
}

/// Lasso of column `j` on the remaining columns at penalty `lambda_j`.
pub fn fit_nodewise(data: &Dataset, j: usize, lambda_j: f64, config: &SolverConfig) -> Result<NodewiseFit> {
    config.validate()?;
    let fit = nodewise_problem(data, None, j)?.fit(lambda_j, config, None)?;
    Ok(finish(j, fit))
}

/// Nodewise fits for every target, with each λ_j fixed or IC-selected on its
/// own grid. Targets are fitted in parallel; results follow the order of `h`.
pub fn nodewise_fits(
    data: &Dataset,
    gram: Option<&Array2<f64>>,
    h: &[usize],
    choice: LambdaChoice,
    config: &SolverConfig,
) -> Result<Vec<NodewiseFit>> {
    h.par_iter()
        .map(|&j| {
            let fit = nodewise_problem(data, gram, j)?.solve(choice, config)?;
            Ok(finish(j, fit))
        })
        .collect()
}

/// Convenience wrapper computing the Gram matrix (when profitable), the
/// nodewise fits and Θ̂_H in one go.
pub fn nodewise_set(data: &Dataset, h: &[usize], choice: LambdaChoice, config: &SolverConfig) -> Result<NodewiseSet> {
    config.validate()?;
    let gram = gram_for(data, config);
    let fits = nodewise_fits(data, gram.as_ref(), h, choice, config)?;
    build_theta(fits, h, data.n())
}

/// Assembles the H-rows of Θ̂ from one fit per target.
pub fn build_theta(fits: Vec<NodewiseFit>, h: &[usize], n: usize) -> Result<NodewiseSet> {
    if h.is_empty() {
        return Err(Error::EmptyH);
    }
    for (i, &j) in h.iter().enumerate() {
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        if h[..i].contains(&j) {
            return Err(Error::InvalidConfig(format!("duplicate target {j}")));
        }
    }
    if let Some(f) = fits.iter().find(|f| !h.contains(&f.j)) {
        return Err(Error::IndexMismatch(f.j));
    }
    let mut ordered = Vec::with_capacity(h.len());
    for &j in h {
        let mut matching = fits.iter().filter(|f| f.j == j);
        let fit = matching.next().ok_or(Error::IndexMismatch(j))?;
        if matching.next().is_some() || fit.gamma.len() + 1 != n {
            return Err(Error::IndexMismatch(j));
        }
        ordered.push(fit.clone());
    }
    let mut theta_rows = Array2::zeros((h.len(), n));
    for (row, fit) in theta_rows.rows_mut().into_iter().zip(&ordered) {
        let inv = 1.0 / fit.tau_sq;
        let mut row = row;
        for k in 0..n {
            row[k] = if k == fit.j { inv } else { -fit.gamma_at(k) * inv };
        }
    }
    Ok(NodewiseSet {
        h: h.to_vec(),
        fits: ordered,
        theta_rows,
    })
}

/// `maxₖ |(Σ̂Θ̂_j')_k − (e_j)_k|` for every target, computed through the design.
pub fn kkt_certificate(set: &NodewiseSet, data: &Dataset) -> Vec<f64> {
    set.h
        .iter()
        .zip(set.theta_rows.rows())
        .map(|(&j, row)| {
            let xtheta = data.x_times(row.as_slice().expect("contiguous"));
            let s = data.xt_times(xtheta.as_slice().expect("contiguous"));
            s.iter()
                .enumerate()
                .map(|(k, &v)| (v - if k == j { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Largest condition number accepted for a covariance submatrix.
pub const MAX_CONDITION: f64 = 1e12;

/// Population projection of `x_j` on the other variables:
/// `γ⁰_j = Σ₋ⱼ,₋ⱼ⁻¹Σ₋ⱼ,ⱼ` and `τ²_j = Σⱼⱼ − Σⱼ,₋ⱼγ⁰_j`.
pub fn population_nodewise(sigma: &Array2<f64>, j: usize) -> Result<(Array1<f64>, f64)> {
    let n = sigma.nrows();
    if sigma.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: "square covariance matrix".into(),
            got: format!("{}x{}", n, sigma.ncols()),
        });
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    if n == 1 {
        return Ok((Array1::zeros(0), sigma[[0, 0]]));
    }
    let rest: Vec<usize> = (0..n).filter(|&k| k != j).collect();
    let sub = Array2::from_shape_fn((n - 1, n - 1), |(a, b)| sigma[[rest[a], rest[b]]]);
    let cross: Array1<f64> = rest.iter().map(|&k| sigma[[k, j]]).collect();
    let cond = condition_number(&sub);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularSigma(cond));
    }
    let chol = Cholesky::new(&sub).ok_or(Error::SingularSigma(f64::INFINITY))?;
    let gamma = chol.solve(&cross);
    let tau_sq = sigma[[j, j]] - cross.dot(&gamma);
    Ok((gamma, tau_sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spd_inverse;
    use crate::testutil::{gaussian_matrix, ols, random_dataset, rng};
    use approx::assert_relative_eq;
    use ndarray::array;

    fn exact_cfg() -> SolverConfig {
        SolverConfig {
            tol: 1e-13,
            max_iter: 200_000,
            ..Default::default()
        }
    }

    #[test]
    fn dead_zone_solution() {
        let mut r = rng(1);
        let d = random_dataset(&mut r, 40, 6);
        let fit = fit_nodewise(&d, 2, 1e6, &SolverConfig::default()).unwrap();
        assert!(fit.gamma.iter().all(|&g| g == 0.0));
        let xj = d.column(2);
        assert_relative_eq!(fit.tau_sq, xj.dot(&xj) / 40.0, max_relative = 1e-14);
        assert_eq!(fit.v_hat, xj.to_owned());
    }

    #[test]
    fn zero_penalty_is_ols_projection() {
        let mut r = rng(2);
        let d = random_dataset(&mut r, 50, 5);
        let fit = fit_nodewise(&d, 1, 0.0, &exact_cfg()).unwrap();
        let xr = d.without_column(1).unwrap();
        let xj = d.column(1).to_owned();
        let g = ols(&xr, &xj);
        for k in 0..4 {
            assert!((fit.gamma[k] - g[k]).abs() < 1e-9);
        }
        let res = &xj - &xr.dot(&g);
        assert_relative_eq!(fit.tau_sq, res.dot(&res) / 50.0, max_relative = 1e-9);
    }

    #[test]
    fn tau_matches_definition() {
        let mut r = rng(3);
        let d = random_dataset(&mut r, 60, 5);
        for j in 0..5 {
            let fit = fit_nodewise(&d, j, 0.05, &SolverConfig::default()).unwrap();
            let xr = d.without_column(j).unwrap();
            let v = &d.column(j) - &xr.dot(&fit.gamma);
            let direct = v.dot(&v) / 60.0 + 0.1 * fit.gamma.iter().map(|g| g.abs()).sum::<f64>();
            assert_relative_eq!(fit.tau_sq, direct, max_relative = 1e-12);
            assert!(fit.tau_sq >= fit.v_hat.dot(&fit.v_hat) / 60.0);
        }
    }

    #[test]
    fn rejects_bad_indices() {
        let mut r = rng(4);
        let d = random_dataset(&mut r, 20, 3);
        assert!(fit_nodewise(&d, 3, 0.1, &SolverConfig::default()).is_err());
        let one = Dataset::new(d.y().clone(), d.x().slice(ndarray::s![.., 0..1]).to_owned()).unwrap();
        assert!(fit_nodewise(&one, 0, 0.1, &SolverConfig::default()).is_err());
    }

    #[test]
    fn theta_row_by_substitution() {
        let fit = NodewiseFit {
            j: 0,
            gamma: array![0.5],
            lambda_j: 0.1,
            tau_sq: 2.0,
            v_hat: array![0.0, 0.0],
            tau_floored: false,
            converged: true,
        };
        let set = build_theta(vec![fit], &[0], 2).unwrap();
        assert_eq!(set.theta_rows.row(0).to_vec(), vec![0.5, -0.25]);
    }

    #[test]
    fn theta_errors() {
        let mut r = rng(5);
        let d = random_dataset(&mut r, 30, 4);
        let f = fit_nodewise(&d, 1, 0.1, &SolverConfig::default()).unwrap();
        assert_eq!(
            build_theta(vec![f.clone()], &[2], 4).unwrap_err(),
            Error::IndexMismatch(1)
        );
        assert_eq!(
            build_theta(vec![f.clone()], &[1, 2], 4).unwrap_err(),
            Error::IndexMismatch(2)
        );
        assert_eq!(build_theta(vec![], &[], 4).unwrap_err(), Error::EmptyH);
        assert!(build_theta(vec![f.clone(), f], &[1, 1], 4).is_err());
    }

    #[test]
    fn exact_inverse_identity() {
        let mut r = rng(6);
        let d = random_dataset(&mut r, 80, 6);
        let h = [0, 3, 5];
        let set = nodewise_set(&d, &h, LambdaChoice::Fixed(0.0), &exact_cfg()).unwrap();
        let inv = spd_inverse(&(d.x().t().dot(d.x()) / 80.0)).unwrap();
        for (i, &j) in h.iter().enumerate() {
            for k in 0..6 {
                assert!((set.theta_rows[[i, k]] - inv[[j, k]]).abs() < 1e-8);
            }
        }
        for c in kkt_certificate(&set, &d) {
            assert!(c < 1e-8);
        }
    }

    #[test]
    fn rows_do_not_depend_on_other_targets() {
        let mut r = rng(7);
        let d = random_dataset(&mut r, 50, 12);
        let choice = LambdaChoice::Auto(crate::solver::Criterion::Bic);
        let cfg = SolverConfig::default();
        let both = nodewise_set(&d, &[2, 9], choice, &cfg).unwrap();
        let alone = nodewise_set(&d, &[9], choice, &cfg).unwrap();
        let rev = nodewise_set(&d, &[9, 2, 4], choice, &cfg).unwrap();
        assert_eq!(both.theta_rows.row(1), alone.theta_rows.row(0));
        assert_eq!(both.theta_rows.row(0), rev.theta_rows.row(1));
    }

    #[test]
    fn orthonormal_certificate_is_zero() {
        let x = array![
            [1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0]
        ];
        let d = Dataset::new(array![1.0, 2.0, 3.0, 4.0], x).unwrap();
        for lambda in [0.0, 0.1, 1.0] {
            let set = nodewise_set(&d, &[0, 2], LambdaChoice::Fixed(lambda), &SolverConfig::default()).unwrap();
            assert!(set.fits.iter().all(|f| f.gamma.iter().all(|&g| g == 0.0)));
            assert!(kkt_certificate(&set, &d).iter().all(|&c| c.abs() < 1e-14));
        }
    }

    #[test]
    fn certificate_respects_extended_kkt_bound() {
        let mut r = rng(8);
        for (t, n) in [(60, 20), (40, 70)] {
            let x = gaussian_matrix(&mut r, t, n);
            let d = Dataset::new(x.column(0).to_owned(), x).unwrap();
            let h: Vec<usize> = (0..5).collect();
            for lambda in [0.02, 0.1, 0.3] {
                let set = nodewise_set(&d, &h, LambdaChoice::Fixed(lambda), &SolverConfig::default()).unwrap();
                for (row, f) in set.theta_rows.rows().into_iter().zip(&set.fits) {
                    let xtheta = d.x_times(row.as_slice().unwrap());
                    let s = d.xt_times(xtheta.as_slice().unwrap());
                    let bound = f.lambda_j / f.tau_sq;
                    for (k, &v) in s.iter().enumerate() {
                        if k != f.j {
                            assert!(v.abs() <= bound + 1e-6, "{v} vs {bound}");
                        }
                    }
                    // τ̂² carries 2λ‖γ̂‖₁, so the diagonal is off by λ‖γ̂‖₁/τ̂².
                    let l1: f64 = f.gamma.iter().map(|g| g.abs()).sum();
                    let diag = (s[f.j] - 1.0).abs();
                    assert!((diag - f.lambda_j * l1 / f.tau_sq).abs() < 1e-6, "{diag}");
                }
            }
        }
    }

    #[test]
    fn population_examples() {
        let (g, tau) = population_nodewise(&Array2::eye(4), 2).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
        assert_eq!(tau, 1.0);
        let s = array![[1.0, 0.6], [0.6, 1.0]];
        let (g, tau) = population_nodewise(&s, 0).unwrap();
        assert_relative_eq!(g[0], 0.6, max_relative = 1e-14);
        assert_relative_eq!(tau, 0.64, max_relative = 1e-14);
    }

    #[test]
    fn population_tau_is_inverse_diagonal() {
        let mut r = rng(9);
        let a = gaussian_matrix(&mut r, 10, 4);
        let sigma = a.t().dot(&a) / 10.0 + Array2::<f64>::eye(4) * 0.1;
        let inv = spd_inverse(&sigma).unwrap();
        for j in 0..4 {
            let (_, tau) = population_nodewise(&sigma, j).unwrap();
            assert_relative_eq!(tau, 1.0 / inv[[j, j]], max_relative = 1e-10);
        }
    }

    #[test]
    fn population_rejects_singular() {
        let s = array![[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(matches!(population_nodewise(&s, 2), Err(Error::SingularSigma(_))));
    }
}
