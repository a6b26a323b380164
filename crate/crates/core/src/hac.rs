//! Bartlett-kernel long-run covariance of the score products `ŵ_{j,t} = v̂_{j,t}û_t`
//! and the sandwich variance of restricted desparsified estimates.
//!
//! Lag covariances are not mean-centered and use `1/(T − l)` normalization:
//!
//! ```text
//! Ξ̂(l) = (1/(T−l)) Σ_{t=l+1}^{T} ŵ_t ŵ_{t−l}'
//! Ω̂    = Ξ̂(0) + Σ_{l=1}^{Q−1} (1 − l/Q)(Ξ̂(l) + Ξ̂(l)')
//! ```

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::desparsify::DesparsifiedEstimate;
use crate::error::{Error, Result};
use crate::nodewise::TAU_SQ_FLOOR;

/// T×h matrix of score products, columns ordered as the target set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub w: Array2<f64>,
}

impl ScoreMatrix {
    pub fn new(w: Array2<f64>) -> Self {
        Self { w }
    }

    pub fn t(&self) -> usize {
        self.w.nrows()
    }

    pub fn h(&self) -> usize {
        self.w.ncols()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HacEstimate {
    pub bandwidth: usize,
    /// Ξ̂(l) for l = 0..bandwidth−1.
    pub xi: Vec<Array2<f64>>,
    pub omega: Array2<f64>,
    pub tau_sq_h: Array1<f64>,
    /// Set once a restriction is applied.
    pub psi: Option<Array2<f64>>,
}

impl HacEstimate {
    /// Scores, lag covariances and Ω̂ for an estimate at bandwidth `q`.
    pub fn from_estimate(estimate: &DesparsifiedEstimate, q: usize) -> Result<Self> {
        let w = score_products(estimate);
        let xi = (0..q.max(1)).map(|l| lag_cov(&w, l)).collect::<Result<Vec<_>>>()?;
        let omega = combine(&xi, q)?;
        Ok(Self {
            bandwidth: q,
            xi,
            omega,
            tau_sq_h: estimate.nodewise.tau_sq(),
            psi: None,
        })
    }

    /// `ω̂_jj / τ̂_j⁴` for every target.
    pub fn coordinate_variances(&self) -> Result<Array1<f64>> {
        (0..self.tau_sq_h.len())
            .map(|i| {
                let tau = self.tau_sq_h[i];
                if !(tau > TAU_SQ_FLOOR) {
                    return Err(Error::SingularTau(tau));
                }
                Ok(self.omega[[i, i]] / (tau * tau))
            })
            .collect()
    }
}

/// `ŵ_{j,t} = v̂_{j,t}·û_t` for every target `j`.
pub fn score_products(estimate: &DesparsifiedEstimate) -> ScoreMatrix {
    let u = &estimate.beta_init.residuals;
    let t = u.len();
    let h = estimate.nodewise.fits.len();
    let mut w = Array2::zeros((t, h));
    for (mut col, fit) in w.columns_mut().into_iter().zip(&estimate.nodewise.fits) {
        for ((c, &v), &ut) in col.iter_mut().zip(&fit.v_hat).zip(u) {
            *c = v * ut;
        }
    }
    ScoreMatrix { w }
}

/// Non-centered lag-`l` cross-product `(1/(T−l)) Σ_{t>l} ŵ_t ŵ_{t−l}'`.
pub fn lag_cov(w: &ScoreMatrix, l: usize) -> Result<Array2<f64>> {
    let t = w.t();
    if l >= t {
        return Err(Error::LagTooLarge { lag: l, t });
    }
    let lead = w.w.slice(ndarray::s![l.., ..]);
    let lagged = w.w.slice(ndarray::s![..t - l, ..]);
    Ok(lead.t().dot(&lagged) / (t - l) as f64)
}

/// Integer bandwidth `⌈(2T)^δ⌉`.
pub fn default_bandwidth(t: usize, delta_q: f64) -> usize {
    // A value within rounding error above an integer counts as that integer.
    let v = (2.0 * t as f64).powf(delta_q);
    let c = v.ceil();
    if c - v > 1.0 - 1e-12 {
        (c - 1.0) as usize
    } else {
        c as usize
    }
}

/// Default exponent of the bandwidth rule.
pub const DEFAULT_DELTA_Q: f64 = 0.1;

fn combine(xi: &[Array2<f64>], q: usize) -> Result<Array2<f64>> {
    let mut omega = xi[0].clone();
    for (l, x) in xi.iter().enumerate().skip(1).take(q.saturating_sub(1)) {
        let k = 1.0 - l as f64 / q as f64;
        omega = omega + (x + &x.t()) * k;
    }
    // Ξ̂(0) is symmetric only up to rounding; make Ω̂ exactly symmetric.
    let sym = (&omega + &omega.t()) * 0.5;
    Ok(sym)
}

/// Bartlett long-run covariance with bandwidth `q` (lags 1..q−1 weighted).
pub fn bartlett_lrv(w: &ScoreMatrix, q: usize) -> Result<Array2<f64>> {
    if q < 1 || q > w.t() {
        return Err(Error::InvalidConfig(format!(
            "bandwidth must lie in 1..={}, got {q}",
            w.t()
        )));
    }
    let xi = (0..q).map(|l| lag_cov(w, l)).collect::<Result<Vec<_>>>()?;
    combine(&xi, q)
}

/// `Ψ̂ = (R D) Ω̂ (R D)'` with `D = diag(1/τ̂_j²)` over the target set, where
/// `r` is P×h with columns ordered as the targets.
pub fn sandwich_psi(omega: &Array2<f64>, tau_sq_h: &Array1<f64>, r: &Array2<f64>) -> Result<Array2<f64>> {
    let h = tau_sq_h.len();
    if omega.dim() != (h, h) || r.ncols() != h {
        return Err(Error::DimensionMismatch {
            expected: format!("{h}x{h} omega and P x {h} restriction"),
            got: format!("{:?} omega and {:?} restriction", omega.dim(), r.dim()),
        });
    }
    if let Some(&tau) = tau_sq_h.iter().find(|&&t| !(t > TAU_SQ_FLOOR)) {
        return Err(Error::SingularTau(tau));
    }
    let mut rd = r.clone();
    for (mut col, &tau) in rd.columns_mut().into_iter().zip(tau_sq_h) {
        col.mapv_inplace(|v| v / tau);
    }
    let psi = rd.dot(omega).dot(&rd.t());
    Ok((&psi + &psi.t()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigenvalues;
    use crate::testutil::{gaussian_matrix, rng};
    use ndarray::{array, concatenate, Axis};
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn col(v: &[f64]) -> ScoreMatrix {
        ScoreMatrix::new(Array2::from_shape_vec((v.len(), 1), v.to_vec()).unwrap())
    }

    #[test]
    fn lag_cov_examples() {
        let w = col(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(lag_cov(&w, 1).unwrap()[[0, 0]], 10.0);
        assert_eq!(lag_cov(&w, 0).unwrap()[[0, 0]], 55.0 / 5.0);
        let c = col(&[1.5; 7]);
        for l in 0..7 {
            assert!((lag_cov(&c, l).unwrap()[[0, 0]] - 2.25).abs() < 1e-15);
        }
        assert_eq!(lag_cov(&w, 5).unwrap_err(), Error::LagTooLarge { lag: 5, t: 5 });
    }

    #[test]
    fn bandwidth_rule() {
        assert_eq!(default_bandwidth(100, 0.1), 2);
        assert_eq!(default_bandwidth(200, 0.1), 2);
        assert_eq!(default_bandwidth(500, 0.1), 2);
        assert_eq!(default_bandwidth(1000, 0.1), 3);
        assert_eq!(default_bandwidth(1, 0.1), 2);
    }

    #[test]
    fn small_bandwidths() {
        let mut r = rng(1);
        let w = ScoreMatrix::new(gaussian_matrix(&mut r, 50, 3));
        let x0 = lag_cov(&w, 0).unwrap();
        let x1 = lag_cov(&w, 1).unwrap();
        let o1 = bartlett_lrv(&w, 1).unwrap();
        let sym0 = (&x0 + &x0.t()) * 0.5;
        assert_eq!(o1, sym0);
        let o2 = bartlett_lrv(&w, 2).unwrap();
        let expect = &x0 + &((&x1 + &x1.t()) * 0.5);
        assert!((&o2 - &expect).iter().all(|v| v.abs() < 1e-15));
        assert!(bartlett_lrv(&w, 0).is_err());
        assert!(bartlett_lrv(&w, 51).is_err());
    }

    #[test]
    fn iid_long_run_variance() {
        let mut r = rng(2);
        let v: Vec<f64> = (0..10_000).map(|_| r.sample(StandardNormal)).collect();
        let o = bartlett_lrv(&col(&v), 3).unwrap()[[0, 0]];
        assert!((o - 1.0).abs() < 0.1, "{o}");
    }

    #[test]
    fn full_bandwidth_is_finite_and_symmetric() {
        let mut r = rng(3);
        let w = ScoreMatrix::new(gaussian_matrix(&mut r, 30, 2));
        let o = bartlett_lrv(&w, 30).unwrap();
        assert!(o.iter().all(|v| v.is_finite()));
        assert_eq!(o, o.t());
    }

    #[test]
    fn zero_columns_do_not_affect_block() {
        let mut r = rng(4);
        let w = gaussian_matrix(&mut r, 40, 2);
        let padded = concatenate![Axis(1), w, Array2::zeros((40, 3))];
        let a = bartlett_lrv(&ScoreMatrix::new(w), 3).unwrap();
        let b = bartlett_lrv(&ScoreMatrix::new(padded), 3).unwrap();
        assert_eq!(b.slice(ndarray::s![..2, ..2]), a);
        assert!(b.slice(ndarray::s![2.., ..]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sandwich_examples() {
        let omega = array![[2.0, 0.3], [0.3, 1.5]];
        let e0 = array![[1.0, 0.0]];
        assert_eq!(sandwich_psi(&omega, &array![1.0, 1.0], &e0).unwrap()[[0, 0]], 2.0);
        assert_eq!(sandwich_psi(&omega, &array![2.0, 1.0], &e0).unwrap()[[0, 0]], 0.5);
        // Identity restriction: Ψ̂ equals D Ω̂ D.
        let tau = array![2.0, 0.5];
        let psi = sandwich_psi(&omega, &tau, &Array2::eye(2)).unwrap();
        let d = Array2::from_diag(&tau.mapv(|t| 1.0 / t));
        let dense = d.dot(&omega).dot(&d);
        assert!((&psi - &dense).iter().all(|v| v.abs() < 1e-15));
        assert!(matches!(
            sandwich_psi(&omega, &array![0.0, 1.0], &e0),
            Err(Error::SingularTau(_))
        ));
        assert!(sandwich_psi(&omega, &array![1.0, 1.0], &array![[1.0]]).is_err());
    }

    #[test]
    fn psi_scales_quadratically() {
        let mut r = rng(5);
        let w = gaussian_matrix(&mut r, 60, 2);
        let tau = array![1.3, 0.7];
        let rr = array![[1.0, -1.0]];
        let a = sandwich_psi(&bartlett_lrv(&ScoreMatrix::new(w.clone()), 3).unwrap(), &tau, &rr).unwrap();
        let b = sandwich_psi(&bartlett_lrv(&ScoreMatrix::new(w * 3.0), 3).unwrap(), &tau, &rr).unwrap();
        assert!((b[[0, 0]] - 9.0 * a[[0, 0]]).abs() < 1e-12 * b[[0, 0]]);
    }

    #[test]
    fn long_bandwidth_can_be_indefinite() {
        // The 1/(T−l) normalization inflates lag terms: Ξ̂(0) = 17/12,
        // Ξ̂(1) = −3/2, so Ω̂ = −1/12 at Q = 2.
        let o = bartlett_lrv(&col(&[1.0, -1.5, 1.0]), 2).unwrap()[[0, 0]];
        assert!((o + 1.0 / 12.0).abs() < 1e-15, "{o}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn bartlett_is_psd(
            seed in 0u64..100_000,
            t in 40usize..300,
            h in 1usize..5,
            q in 1usize..=8,
            heavy in any::<bool>(),
        ) {
            let mut r = rng(seed);
            let mut w = gaussian_matrix(&mut r, t, h);
            if heavy {
                w.mapv_inplace(|v| v.powi(3));
            }
            // Persistent columns stress the lag terms.
            for j in 0..h {
                for i in 1..t {
                    let prev = w[[i - 1, j]];
                    w[[i, j]] += 0.8 * prev;
                }
            }
            let o = bartlett_lrv(&ScoreMatrix::new(w), q.min(t / 10)).unwrap();
            prop_assert_eq!(&o, &o.t());
            prop_assert!(symmetric_eigenvalues(&o)[0] >= -1e-10);
        }
    }
}
