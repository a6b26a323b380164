//! Sparsity and design diagnostics: weak-sparsity norms, sparsity index
//! sets, the compatibility constant, sample-versus-population covariance
//! closeness and the decay of lasso errors as `T` grows.
//!
//! The compatibility constant
//!
//! ```text
//! φ²(S) = min { |S|·z'Σz / ‖z_S‖₁² : ‖z_{Sᶜ}‖₁ ≤ 3‖z_S‖₁, z_S ≠ 0 }
//! ```
//!
//! is convex within each sign orthant. `ExhaustiveSmall` enumerates orthants
//! (N ≤ 8) and solves each piece by accelerated projected gradient. `Sampled`
//! draws random cone points and refines the best ones in their orthants; the
//! result is attained by a feasible point and is therefore an upper estimate.

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::simulate::{replicate, simulate, ExperimentSettings, ScenarioConfig};
use crate::solver::fit_auto;

/// Cone radius in `‖z_{Sᶜ}‖₁ ≤ 3‖z_S‖₁`.
pub const CONE_FACTOR: f64 = 3.0;
/// Largest dimension accepted by the exhaustive method.
pub const EXHAUSTIVE_MAX_N: usize = 8;
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityProfile {
    pub r: f64,
    /// `‖β‖_r^r`.
    pub s_r: f64,
    /// `S_λ = {j : |β_j| > λ}`.
    pub s_lambda: Vec<usize>,
    pub cardinality: usize,
}

/// `Σ_j |β_j|^r`; `r = 0` counts nonzeros.
///
/// # Panics
/// If `r` is outside `[0, 1)`.
pub fn weak_sparsity_norm(beta: ArrayView1<'_, f64>, r: f64) -> f64 {
    assert!((0.0..1.0).contains(&r), "r must lie in [0, 1), got {r}");
    if r == 0.0 {
        beta.iter().filter(|&&b| b != 0.0).count() as f64
    } else {
        beta.iter().map(|b| b.abs().powf(r)).sum()
    }
}

/// Indices with `|β_j| > λ` (strict).
pub fn sparsity_index_set(beta: ArrayView1<'_, f64>, lambda: f64) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, b)| b.abs() > lambda)
        .map(|(j, _)| j)
        .collect()
}

pub fn sparsity_profile(beta: ArrayView1<'_, f64>, r: f64, lambda: f64) -> SparsityProfile {
    let s_lambda = sparsity_index_set(beta, lambda);
    SparsityProfile {
        r,
        s_r: weak_sparsity_norm(beta, r),
        cardinality: s_lambda.len(),
        s_lambda,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CompatibilityMethod {
    ExhaustiveSmall,
    Sampled { samples: usize, seed: u64 },
}

impl CompatibilityMethod {
    pub fn sampled(seed: u64) -> Self {
        CompatibilityMethod::Sampled {
            samples: DEFAULT_SAMPLES,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityEstimate {
    pub value: f64,
    pub method: CompatibilityMethod,
    /// True for the sampled method, whose value is only an upper estimate.
    pub heuristic: bool,
    /// `Λ_min(Σ)`, a lower bound on φ².
    pub eigen_lower_bound: f64,
    /// Cone point attaining `value`.
    pub minimizer: Array1<f64>,
}

/// `|S|·z'Σz / ‖z_S‖₁²` when `z` lies in the cone, `None` otherwise.
pub fn compatibility_ratio(sigma: &Array2<f64>, s: &[usize], z: ArrayView1<'_, f64>) -> Option<f64> {
    let in_s = membership(sigma.nrows(), s);
    let (l1_s, l1_c) = split_l1(&in_s, z);
    if !(l1_s > 0.0) || l1_c > CONE_FACTOR * l1_s * (1.0 + 1e-12) {
        return None;
    }
    Some(s.len() as f64 * z.dot(&sigma.dot(&z)) / (l1_s * l1_s))
}

pub fn compatibility_constant(
    sigma: &Array2<f64>,
    s: &[usize],
    method: CompatibilityMethod,
) -> Result<CompatibilityEstimate> {
    let n = sigma.nrows();
    if sigma.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: "square covariance matrix".into(),
            got: format!("{}x{}", n, sigma.ncols()),
        });
    }
    if s.is_empty() {
        return Err(Error::EmptyS);
    }
    if let Some(&j) = s.iter().find(|&&j| j >= n) {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let in_s = membership(n, s);
    let card = in_s.iter().filter(|&&b| b).count() as f64;
    let ev = symmetric_eigenvalues(sigma);
    let lmax = ev.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let (best, heuristic) = match method {
        CompatibilityMethod::ExhaustiveSmall => {
            if n > EXHAUSTIVE_MAX_N {
                return Err(Error::InvalidConfig(format!(
                    "exhaustive compatibility search needs N <= {EXHAUSTIVE_MAX_N}, got {n}"
                )));
            }
            (exhaustive(sigma, &in_s, lmax), false)
        }
        CompatibilityMethod::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidConfig("at least one sample is required".into()));
            }
            (sampled(sigma, &in_s, lmax, samples, seed), true)
        }
    };
    Ok(CompatibilityEstimate {
        value: card * best.0,
        method,
        heuristic,
        eigen_lower_bound: ev.first().copied().unwrap_or(0.0),
        minimizer: best.1,
    })
}

fn membership(n: usize, s: &[usize]) -> Vec<bool> {
    let mut in_s = vec![false; n];
    for &j in s {
        in_s[j] = true;
    }
    in_s
}

fn split_l1(in_s: &[bool], z: ArrayView1<'_, f64>) -> (f64, f64) {
    z.iter().zip(in_s).fold(
        (0.0, 0.0),
        |(a, b), (v, &i)| {
            if i {
                (a + v.abs(), b)
            } else {
                (a, b + v.abs())
            }
        },
    )
}

/// Euclidean projection onto `{w ≥ 0, Σw = radius}`.
fn project_simplex(v: &mut [f64], radius: f64) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - radius) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Projection onto `{w_S ≥ 0, Σw_S = 1} × {w_{Sᶜ} ≥ 0, Σw_{Sᶜ} ≤ 3}`.
fn project(w: &mut [f64], in_s: &[bool]) {
    let (mut ws, mut wc): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for (x, &i) in w.iter().zip(in_s) {
        if i {
            ws.push(*x)
        } else {
            wc.push(x.max(0.0))
        }
    }
    project_simplex(&mut ws, 1.0);
    if wc.iter().sum::<f64>() > CONE_FACTOR {
        project_simplex(&mut wc, CONE_FACTOR);
    }
    let (mut a, mut b) = (ws.into_iter(), wc.into_iter());
    for (x, &i) in w.iter_mut().zip(in_s) {
        *x = if i { a.next() } else { b.next() }.expect("split sizes");
    }
}

/// Minimizes `w'Mw` over the projected set with restarted FISTA, where
/// `M = DΣD` for the orthant signs `D`.
fn orthant_min(m: &Array2<f64>, in_s: &[bool], start: Vec<f64>, lmax: f64) -> (f64, Vec<f64>) {
    let step = 1.0 / (2.0 * lmax);
    let obj = |w: &[f64]| {
        let w = ArrayView1::from(w);
        w.dot(&m.dot(&w))
    };
    let mut x = start;
    project(&mut x, in_s);
    let mut y = x.clone();
    let mut f_x = obj(&x);
    let mut t = 1.0f64;
    for _ in 0..20_000 {
        let g = m.dot(&ArrayView1::from(&y[..]));
        let mut next: Vec<f64> = y.iter().zip(&g).map(|(v, gi)| v - step * 2.0 * gi).collect();
        project(&mut next, in_s);
        let f_next = obj(&next);
        let change = next.iter().zip(&x).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        if f_next > f_x {
            // Restart momentum.
            t = 1.0;
            y = x.clone();
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = next.iter().zip(&x).map(|(p, q)| p + beta * (p - q)).collect();
        x = next;
        f_x = f_next;
        t = t_next;
        if change < 1e-13 {
            break;
        }
    }
    (f_x, x)
}

fn signed(sigma: &Array2<f64>, signs: &[f64]) -> Array2<f64> {
    let n = signs.len();
    Array2::from_shape_fn((n, n), |(i, j)| signs[i] * signs[j] * sigma[[i, j]])
}

fn exhaustive(sigma: &Array2<f64>, in_s: &[bool], lmax: f64) -> (f64, Array1<f64>) {
    let n = in_s.len();
    let anchor = in_s.iter().position(|&b| b).expect("nonempty S");
    let card = in_s.iter().filter(|&&b| b).count() as f64;
    let others: Vec<usize> = (0..n).filter(|&i| i != anchor).collect();
    let start: Vec<f64> = in_s.iter().map(|&b| if b { 1.0 / card } else { 0.0 }).collect();
    (0..1usize << others.len())
        .into_par_iter()
        .map(|mask| {
            let mut signs = vec![1.0; n];
            for (bit, &i) in others.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    signs[i] = -1.0;
                }
            }
            let (f, w) = orthant_min(&signed(sigma, &signs), in_s, start.clone(), lmax);
            (f, w.iter().zip(&signs).map(|(a, s)| a * s).collect::<Array1<f64>>())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(
            (f64::INFINITY, Array1::zeros(n)),
            |best, c| if c.0 < best.0 { c } else { best },
        )
}

const CHUNK: usize = 4096;
const REFINE: usize = 8;

fn sampled(sigma: &Array2<f64>, in_s: &[bool], lmax: f64, samples: usize, seed: u64) -> (f64, Array1<f64>) {
    let n = in_s.len();
    let chunks = samples.div_ceil(CHUNK);
    let mut candidates: Vec<(f64, Array1<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = crate::simulate::stream(seed, c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut best: Vec<(f64, Array1<f64>)> = Vec::with_capacity(REFINE + 1);
            for _ in 0..count {
                let mut z: Array1<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let (l1_s, l1_c) = split_l1(in_s, z.view());
                let radius = CONE_FACTOR * rng.random::<f64>();
                for (v, &i) in z.iter_mut().zip(in_s) {
                    *v /= if i { l1_s } else { l1_c / radius };
                }
                let f = z.dot(&sigma.dot(&z));
                if best.len() < REFINE || f < best[REFINE - 1].0 {
                    best.push((f, z));
                    best.sort_by(|a, b| a.0.total_cmp(&b.0));
                    best.truncate(REFINE);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.truncate(REFINE);
    candidates
        .into_par_iter()
        .map(|(f, z)| {
            let signs: Vec<f64> = z.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
            let start: Vec<f64> = z.iter().map(|v| v.abs()).collect();
            let (g, w) = orthant_min(&signed(sigma, &signs), in_s, start, lmax);
            if g < f {
                (g, w.iter().zip(&signs).map(|(a, s)| a * s).collect())
            } else {
                (f, z)
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(
            (f64::INFINITY, Array1::zeros(n)),
            |best, c| if c.0 < best.0 { c } else { best },
        )
}

/// Entrywise maximum absolute difference of two matrices.
pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", a.dim()),
            got: format!("{:?}", b.dim()),
        });
    }
    Ok(a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// `‖X'X/T − Σ‖_∞` (entrywise maximum).
pub fn covariance_closeness(data: &Dataset, sigma: &Array2<f64>) -> Result<f64> {
    max_abs_diff(&data.gram(), sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayMetric {
    /// `‖β̂ − β⁰‖₁`.
    L1Estimation,
    /// `‖X(β̂ − β⁰)‖₂²/T`.
    Prediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: usize,
    pub median: f64,
    pub replications: usize,
    pub excluded: usize,
}

pub fn decay_metric(data: &Dataset, beta_true: &Array1<f64>, beta_hat: &Array1<f64>, metric: DecayMetric) -> f64 {
    let diff = beta_hat - beta_true;
    match metric {
        DecayMetric::L1Estimation => diff.iter().map(|v| v.abs()).sum(),
        DecayMetric::Prediction => {
            let fit = data.x().dot(&diff);
            fit.dot(&fit) / data.t() as f64
        }
    }
}

/// Median of a sample; NaN when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

/// Median lasso error over replications for each `T`, with IC-selected λ.
pub fn error_decay_study(
    scenario: &ScenarioConfig,
    t_list: &[usize],
    metric: DecayMetric,
    settings: &ExperimentSettings,
) -> Result<Vec<DecayRow>> {
    if t_list.is_empty() || t_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "T list must be nonempty and strictly increasing".into(),
        ));
    }
    t_list
        .iter()
        .map(|&t| {
            let config = ScenarioConfig { t, ..scenario.clone() };
            config.validate()?;
            let errors: Vec<f64> = replicate(
                &config,
                |rep| {
                    let sim = simulate(&config, rep).ok()?;
                    let fit = fit_auto(&sim.data, settings.criterion, &settings.solver).ok()?;
                    fit.converged
                        .then(|| decay_metric(&sim.data, &sim.beta, &fit.beta, metric))
                },
                None,
            )
            .into_iter()
            .flatten()
            .collect();
            Ok(DecayRow {
                t,
                median: median(&errors),
                replications: config.replications,
                excluded: config.replications - errors.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{ErrorLaw, ScenarioKind};
    use crate::solver::{fit_lasso, SolverConfig};
    use crate::testutil::{gaussian_matrix, rng};
    use approx::assert_relative_eq;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn weak_sparsity_examples() {
        assert_eq!(weak_sparsity_norm(array![1.0, 0.0, 0.0].view(), 0.0), 1.0);
        assert_relative_eq!(
            weak_sparsity_norm(array![1.0, 0.25].view(), 0.5),
            1.5,
            max_relative = 1e-15
        );
        let beta: Array1<f64> = (1..=50).map(|j| 0.4f64.powi(j)).collect();
        let q = 0.4f64.sqrt();
        let closed = q * (1.0 - q.powi(50)) / (1.0 - q);
        assert!((weak_sparsity_norm(beta.view(), 0.5) - closed).abs() < 1e-9);
    }

    #[test]
    #[should_panic]
    fn weak_sparsity_rejects_r_one() {
        weak_sparsity_norm(array![1.0].view(), 1.0);
    }

    #[test]
    fn index_set_examples() {
        assert_eq!(sparsity_index_set(array![0.5, 0.1, 0.0].view(), 0.2), vec![0]);
        assert_eq!(sparsity_index_set(array![0.5, 0.1, 0.0].view(), 0.0), vec![0, 1]);
        assert_eq!(sparsity_index_set(array![0.2, 0.3].view(), 0.2), vec![1]);
        let p = sparsity_profile(array![0.5, 0.1, 0.0].view(), 0.0, 0.2);
        assert_eq!((p.s_r, p.cardinality), (2.0, 1));
    }

    #[test]
    fn compatibility_identity_full_support() {
        for n in 1..=5 {
            let s: Vec<usize> = (0..n).collect();
            let est = compatibility_constant(&Array2::eye(n), &s, CompatibilityMethod::ExhaustiveSmall).unwrap();
            assert!((est.value - 1.0).abs() < 1e-4, "{n}: {}", est.value);
            assert!(!est.heuristic);
        }
    }

    #[test]
    fn compatibility_identity_singleton() {
        // One unit on S; the rest cannot lower z'z below 1.
        let est = compatibility_constant(&Array2::eye(2), &[0], CompatibilityMethod::sampled(1)).unwrap();
        assert!(est.heuristic);
        assert_eq!(est.eigen_lower_bound, 1.0);
        assert!(est.value >= est.eigen_lower_bound - 1e-9);
        assert!((est.value - 1.0).abs() < 1e-6);
    }

    fn equicorrelated(n: usize, rho: f64) -> Array2<f64> {
        Array2::from_shape_fn((n, n), |(i, j)| if i == j { 1.0 } else { rho })
    }

    #[test]
    fn compatibility_methods_agree() {
        let sigma = equicorrelated(4, 0.5);
        let ex = compatibility_constant(&sigma, &[0], CompatibilityMethod::ExhaustiveSmall).unwrap();
        let sa = compatibility_constant(&sigma, &[0], CompatibilityMethod::sampled(3)).unwrap();
        assert!((ex.value - sa.value).abs() < 1e-3, "{} vs {}", ex.value, sa.value);
        assert!(ex.value >= ex.eigen_lower_bound - 1e-9);
        // The minimizer is a cone point attaining the value.
        let r = compatibility_ratio(&sigma, &[0], ex.minimizer.view()).unwrap();
        assert!((r - ex.value).abs() < 1e-9);
    }

    #[test]
    fn compatibility_equicorrelated_closed_form() {
        // S = {0}, z_S = 1: minimize (1 + ρΣc)² + (1−ρ)Σc² over the rest with
        // equal entries c and ‖z_{Sᶜ}‖₁ ≤ 3; the optimum is interior.
        let (n, rho) = (4usize, 0.5);
        let m = (n - 1) as f64;
        let f = |c: f64| 1.0 + 2.0 * rho * m * c + rho * m * m * c * c + (1.0 - rho) * m * c * c;
        let c_star = -rho * m / (rho * m * m + (1.0 - rho) * m);
        let est = compatibility_constant(&equicorrelated(n, rho), &[0], CompatibilityMethod::ExhaustiveSmall).unwrap();
        assert!((est.value - f(c_star)).abs() < 1e-4, "{} vs {}", est.value, f(c_star));
    }

    #[test]
    fn compatibility_errors() {
        let sigma = Array2::<f64>::eye(3);
        assert_eq!(
            compatibility_constant(&sigma, &[], CompatibilityMethod::ExhaustiveSmall),
            Err(Error::EmptyS)
        );
        assert!(compatibility_constant(&Array2::eye(9), &[0], CompatibilityMethod::ExhaustiveSmall).is_err());
        assert!(compatibility_constant(&sigma, &[3], CompatibilityMethod::ExhaustiveSmall).is_err());
    }

    #[test]
    fn ratio_rejects_points_outside_cone() {
        let sigma = Array2::<f64>::eye(3);
        assert!(compatibility_ratio(&sigma, &[0], array![1.0, 2.0, 2.0].view()).is_none());
        assert!(compatibility_ratio(&sigma, &[0], array![0.0, 0.0, 0.0].view()).is_none());
        assert_eq!(
            compatibility_ratio(&sigma, &[0], array![1.0, 1.0, 1.0].view()),
            Some(3.0)
        );
    }

    #[test]
    fn projection_lands_in_set() {
        let in_s = [true, true, false, false];
        let mut w = vec![3.0, -1.0, 5.0, 4.0];
        project(&mut w, &in_s);
        assert!((w[0] + w[1] - 1.0).abs() < 1e-12);
        assert!((w[2] + w[3] - 3.0).abs() < 1e-12);
        assert!(w.iter().all(|&v| v >= 0.0));
        let mut w = vec![0.5, 0.5, 0.1, -0.2];
        project(&mut w, &in_s);
        assert_eq!(w, vec![0.5, 0.5, 0.1, 0.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn compatibility_is_below_every_cone_ratio(seed in 0u64..1000, n in 2usize..6) {
            let mut r = rng(seed);
            let a = gaussian_matrix(&mut r, 2 * n, n);
            let sigma = a.t().dot(&a) / (2 * n) as f64 + Array2::<f64>::eye(n) * 0.05;
            let s = vec![0];
            let est = compatibility_constant(&sigma, &s, CompatibilityMethod::ExhaustiveSmall).unwrap();
            let probes = gaussian_matrix(&mut r, 50, n);
            for z in probes.rows() {
                let mut z = z.to_owned();
                let (ls, lc) = split_l1(&membership(n, &s), z.view());
                if lc > CONE_FACTOR * ls {
                    for v in z.iter_mut().skip(1) {
                        *v *= CONE_FACTOR * ls / lc;
                    }
                }
                if let Some(ratio) = compatibility_ratio(&sigma, &s, z.view()) {
                    prop_assert!(est.value <= ratio + 1e-6);
                }
            }
        }

        #[test]
        fn weak_sparsity_permutation_and_monotone(v in proptest::collection::vec(-2.0f64..2.0, 1..20), r in 0.0f64..0.99) {
            let a = Array1::from(v.clone());
            let mut rev = v.clone();
            rev.reverse();
            let b = Array1::from(rev);
            prop_assert!((weak_sparsity_norm(a.view(), r) - weak_sparsity_norm(b.view(), r)).abs() < 1e-9);
            let bigger = a.mapv(|x| x * 1.5);
            prop_assert!(weak_sparsity_norm(bigger.view(), r) >= weak_sparsity_norm(a.view(), r) - 1e-12);
        }

        #[test]
        fn index_sets_nest(v in proptest::collection::vec(-2.0f64..2.0, 1..20), l1 in 0.0f64..1.0, dl in 0.0f64..1.0) {
            let a = Array1::from(v);
            let small = sparsity_index_set(a.view(), l1);
            let large = sparsity_index_set(a.view(), l1 + dl);
            prop_assert!(large.iter().all(|j| small.contains(j)));
        }

        #[test]
        fn closeness_is_symmetric(seed in 0u64..1000) {
            let mut r = rng(seed);
            let a = gaussian_matrix(&mut r, 4, 4);
            let b = gaussian_matrix(&mut r, 4, 4);
            prop_assert_eq!(max_abs_diff(&a, &b).unwrap(), max_abs_diff(&b, &a).unwrap());
            prop_assert_eq!(max_abs_diff(&a, &a).unwrap(), 0.0);
            prop_assert!(max_abs_diff(&a, &b).unwrap() > 0.0);
        }
    }

    #[test]
    fn closeness_examples() {
        let d = Dataset::new(array![0.0, 0.0], array![[1.0, 1.0], [1.0, -1.0]]).unwrap();
        assert_eq!(covariance_closeness(&d, &Array2::eye(2)).unwrap(), 0.0);
        assert!(covariance_closeness(&d, &Array2::eye(3)).is_err());
    }

    #[test]
    fn closeness_hand_instance() {
        // Rows (1, p), (1, q) with p + q = 0.4 and p² + q² = 2 give [[1, .2], [.2, 1]].
        let p = (0.4 + (4.0 - 0.16f64).sqrt()) / 2.0;
        let q = 0.4 - p;
        let d = Dataset::new(array![0.0, 0.0], array![[1.0, p], [1.0, q]]).unwrap();
        let g = d.gram();
        assert!((g[[0, 1]] - 0.2).abs() < 1e-12 && (g[[1, 1]] - 1.0).abs() < 1e-12);
        assert!((covariance_closeness(&d, &Array2::eye(2)).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn closeness_concentrates() {
        let mut hits = 0;
        for seed in 0..20 {
            let mut r = rng(seed);
            let x = gaussian_matrix(&mut r, 10_000, 50);
            let d = Dataset::new(Array1::zeros(10_000), x).unwrap();
            hits += usize::from(covariance_closeness(&d, &Array2::eye(50)).unwrap() < 0.15);
        }
        assert_eq!(hits, 20);
    }

    #[test]
    fn decay_metrics_vanish_at_truth() {
        let sim = simulate(
            &ScenarioConfig::new(ScenarioKind::ArdlBlockDiag(ErrorLaw::Iid), 11, 50),
            0,
        )
        .unwrap();
        for m in [DecayMetric::L1Estimation, DecayMetric::Prediction] {
            assert_eq!(decay_metric(&sim.data, &sim.beta, &sim.beta, m), 0.0);
        }
    }

    #[test]
    fn prediction_metric_matches_residual_identity() {
        let sim = simulate(
            &ScenarioConfig::new(ScenarioKind::ArdlBlockDiag(ErrorLaw::Iid), 21, 120),
            2,
        )
        .unwrap();
        let fit = fit_lasso(&sim.data, 0.05, &SolverConfig::default(), None).unwrap();
        let pred = decay_metric(&sim.data, &sim.beta, &fit.beta, DecayMetric::Prediction);
        let u_hat = sim.data.y() - &sim.data.x().dot(&fit.beta);
        let gap = &u_hat - &sim.u;
        assert_relative_eq!(pred, gap.dot(&gap) / 120.0, max_relative = 1e-10);
    }

    #[test]
    fn decay_study_shape() {
        let c = ScenarioConfig::new(ScenarioKind::ArdlBlockDiag(ErrorLaw::Iid), 11, 0).with_replications(6);
        let rows = error_decay_study(
            &c,
            &[100, 400],
            DecayMetric::L1Estimation,
            &ExperimentSettings::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].t, 100);
        assert!(rows.iter().all(|r| r.median.is_finite() && r.excluded == 0));
        assert!(error_decay_study(
            &c,
            &[400, 100],
            DecayMetric::L1Estimation,
            &ExperimentSettings::default()
        )
        .is_err());
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
