//! Helpers shared by the unit tests: random designs and independent oracles.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::linalg::spd_inverse;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut impl Rng, t: usize, n: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((t, n), || rng.sample(StandardNormal))
}

/// Sparse linear model with Gaussian design and noise.
pub fn random_dataset(rng: &mut impl Rng, t: usize, n: usize) -> Dataset {
    let x = gaussian_matrix(rng, t, n);
    let mut beta = Array1::zeros(n);
    for j in 0..n.min(3) {
        beta[j] = 1.0 - 0.6 * j as f64;
    }
    let noise: Array1<f64> = Array1::from_shape_simple_fn(t, || rng.sample(StandardNormal));
    let y = x.dot(&beta) + noise;
    Dataset::new(y, x).unwrap()
}

/// Least squares by the normal equations.
pub fn ols(x: &Array2<f64>, y: &Array1<f64>) -> Array1<f64> {
    let xtx = x.t().dot(x);
    spd_inverse(&xtx).unwrap().dot(&x.t().dot(y))
}

/// Accelerated proximal gradient with adaptive restart on the objective
/// `‖y − Xβ‖²/T + 2λ‖β‖₁`, run until coefficient changes drop below `tol`.
pub fn proximal_gradient(data: &Dataset, lambda: f64, tol: f64) -> (Array1<f64>, f64) {
    let t = data.t() as f64;
    let x = data.x();
    let y = data.y();
    let g = x.t().dot(x) / t;
    let c = x.t().dot(y) / t;
    let lip = 2.0 * crate::linalg::symmetric_eigenvalues(&g).last().copied().unwrap();
    let step = 1.0 / lip;
    let n = data.n();
    let mut b = Array1::<f64>::zeros(n);
    let mut z = b.clone();
    let mut mom = 1.0f64;
    for _ in 0..500_000 {
        let grad = (g.dot(&z) - &c) * 2.0;
        let v = &z - &(grad * step);
        let nb = v.mapv(|vi| crate::solver::soft_threshold(vi, 2.0 * lambda * step));
        let diff = &nb - &b;
        let change = diff.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let nmom = (1.0 + (1.0 + 4.0 * mom * mom).sqrt()) / 2.0;
        // Restart momentum when it points uphill.
        if (&z - &nb).dot(&diff) > 0.0 {
            mom = 1.0;
            z = nb.clone();
        } else {
            z = &nb + &(diff * ((mom - 1.0) / nmom));
            mom = nmom;
        }
        b = nb;
        if change < tol {
            break;
        }
    }
    let r = y - &x.dot(&b);
    let obj = r.dot(&r) / t + 2.0 * lambda * b.iter().map(|v| v.abs()).sum::<f64>();
    (b, obj)
}

/// Worst KKT violation of a coefficient vector.
pub fn kkt_violation(data: &Dataset, beta: &Array1<f64>, lambda: f64) -> f64 {
    let t = data.t() as f64;
    let r = data.y() - &data.x().dot(beta);
    let grad = data.x().t().dot(&r) / t;
    grad.iter()
        .zip(beta)
        .map(|(&gj, &bj)| {
            if bj == 0.0 {
                (gj.abs() - lambda).max(0.0)
            } else {
                (gj - lambda * bj.signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}
