//! Lasso by cyclic coordinate descent, λ grids, warm-started paths and
//! information-criterion selection.
//!
//! The objective uses the `1/T` loss scaling and a `2λ` penalty:
//!
//! ```text
//! minimize  ‖y − Xβ‖²/T + 2λ‖β‖₁
//! ```
//!
//! This is twice the `‖y − Xβ‖²/(2T) + λ‖β‖₁` objective, so minimizers agree
//! with that convention at the same λ; reported objective values differ by a
//! factor of two.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::{axpy, dot, Dataset};
use crate::error::{Error, Result};

/// Proximal map of the ℓ1 penalty: `sign(z)·max(|z| − γ, 0)`.
#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// How the coordinate-descent state is maintained between updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// Gram updates when N is moderate, residual updates otherwise.
    #[default]
    Auto,
    /// Keep the residual vector `r = y − Xβ` current (O(T) per update).
    Residual,
    /// Keep `X'r/T` current through the Gram matrix (O(N) per nonzero update).
    Gram,
}

const AUTO_GRAM_MAX_N: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative max-coordinate-change threshold.
    pub tol: f64,
    /// Maximum number of sweeps (full and active-set) per fit.
    pub max_iter: usize,
    /// Cap on nonzero coefficients for IC eligibility; `None` means ⌊T/2⌋.
    pub max_support: Option<usize>,
    pub grid_size: usize,
    /// Center and scale columns, fit, and back-transform the coefficients.
    pub standardize: bool,
    /// Stop a path after the first fit whose support exceeds the cap.
    pub truncate_path: bool,
    pub update: UpdateRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 10_000,
            max_support: None,
            grid_size: 200,
            standardize: false,
            truncate_path: true,
            update: UpdateRule::Auto,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.max_support == Some(0) {
            return Err(Error::InvalidConfig("max_support must be at least 1".into()));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidConfig("grid_size must be at least 2".into()));
        }
        Ok(())
    }

    /// Support cap for a sample of length `t`.
    pub fn support_cap(&self, t: usize) -> usize {
        self.max_support.unwrap_or((t / 2).max(1))
    }

    fn use_gram(&self, n: usize) -> bool {
        match self.update {
            UpdateRule::Gram => true,
            UpdateRule::Residual => false,
            UpdateRule::Auto => n <= AUTO_GRAM_MAX_N,
        }
    }
}

/// Output of a single lasso fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFit {
    pub beta: Array1<f64>,
    pub lambda: f64,
    /// `y − intercept − Xβ̂`.
    pub residuals: Array1<f64>,
    pub support: Vec<usize>,
    /// `‖y − Xβ̂‖²/T + 2λ‖β̂‖₁` (on the standardized scale when standardizing).
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Whether the support respects the configured cap.
    pub eligible: bool,
    /// Zero unless the fit was standardized.
    pub intercept: f64,
}

impl LassoFit {
    pub fn rss(&self) -> f64 {
        self.residuals.dot(&self.residuals)
    }

    pub fn df(&self) -> usize {
        self.support.len()
    }

    /// Turns a flagged non-converged fit into an error.
    pub fn check_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                lambda: self.lambda,
                iterations: self.iterations,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Coordinate-descent kernels
// ---------------------------------------------------------------------------

trait Kernel {
    fn len(&self) -> usize;
    /// `‖x_j‖²/T`.
    fn col_sq(&self, j: usize) -> f64;
    /// `x_j'r/T` at the current coefficients.
    fn grad(&self, j: usize) -> f64;
    /// Apply `β_j += delta` to the maintained state.
    fn shift(&mut self, j: usize, delta: f64);
    /// `‖r‖²/T` at the current coefficients.
    fn loss(&self, beta: &[f64]) -> f64;
}

struct ResidualKernel<'a> {
    cols: Vec<&'a [f64]>,
    col_sq: Vec<f64>,
    r: Vec<f64>,
    inv_t: f64,
}

impl<'a> ResidualKernel<'a> {
    fn new(cols: Vec<&'a [f64]>, response: &[f64], beta: &[f64]) -> Self {
        let inv_t = 1.0 / response.len() as f64;
        let col_sq = cols.iter().map(|c| dot(c, c) * inv_t).collect();
        let mut r = response.to_vec();
        for (c, &b) in cols.iter().zip(beta) {
            if b != 0.0 {
                axpy(-b, c, &mut r);
            }
        }
        Self { cols, col_sq, r, inv_t }
    }
}

impl Kernel for ResidualKernel<'_> {
    fn len(&self) -> usize {
        self.cols.len()
    }
    fn col_sq(&self, j: usize) -> f64 {
        self.col_sq[j]
    }
    fn grad(&self, j: usize) -> f64 {
        dot(self.cols[j], &self.r) * self.inv_t
    }
    fn shift(&mut self, j: usize, delta: f64) {
        axpy(-delta, self.cols[j], &mut self.r);
    }
    fn loss(&self, _beta: &[f64]) -> f64 {
        dot(&self.r, &self.r) * self.inv_t
    }
}

/// Covariance-update kernel: keeps `g = c − G β` where `G` is the Gram
/// submatrix over `idx` and `c = X'y/T`.
struct GramKernel<'a> {
    gram: &'a Array2<f64>,
    idx: &'a [usize],
    c: Vec<f64>,
    g: Vec<f64>,
    yy: f64,
}

impl<'a> GramKernel<'a> {
    fn new(gram: &'a Array2<f64>, idx: &'a [usize], c: Vec<f64>, yy: f64, beta: &[f64]) -> Self {
        let mut g = c.clone();
        for (a, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                let row = gram.row(idx[a]);
                for (gk, &k) in g.iter_mut().zip(idx) {
                    *gk -= b * row[k];
                }
            }
        }
        Self { gram, idx, c, g, yy }
    }
}

impl Kernel for GramKernel<'_> {
    fn len(&self) -> usize {
        self.idx.len()
    }
    fn col_sq(&self, j: usize) -> f64 {
        self.gram[[self.idx[j], self.idx[j]]]
    }
    fn grad(&self, j: usize) -> f64 {
        self.g[j]
    }
    fn shift(&mut self, j: usize, delta: f64) {
        let row = self.gram.row(self.idx[j]);
        let row = row.as_slice().expect("gram is row-major");
        for (gk, &k) in self.g.iter_mut().zip(self.idx) {
            *gk -= delta * row[k];
        }
    }
    fn loss(&self, beta: &[f64]) -> f64 {
        // ‖y − Xβ‖²/T = y'y/T − c'β − β'g with g = c − Gβ.
        let mut v = self.yy;
        for ((&b, &c), &g) in beta.iter().zip(&self.c).zip(&self.g) {
            v -= b * (c + g);
        }
        v.max(0.0)
    }
}

struct CdOutcome {
    iterations: usize,
    converged: bool,
}

fn sweep<K: Kernel>(k: &mut K, lambda: f64, beta: &mut [f64], coords: &[usize]) -> f64 {
    let mut max_change = 0.0f64;
    for &j in coords {
        let d = k.col_sq(j);
        if d == 0.0 {
            continue;
        }
        let old = beta[j];
        let z = k.grad(j) + d * old;
        let new = soft_threshold(z, lambda) / d;
        if new != old {
            beta[j] = new;
            k.shift(j, new - old);
            max_change = max_change.max((new - old).abs());
        }
    }
    max_change
}

fn run_cd<K: Kernel>(
    k: &mut K,
    lambda: f64,
    beta: &mut [f64],
    tol: f64,
    max_iter: usize,
    mut trace: Option<&mut Vec<f64>>,
) -> CdOutcome {
    let n = k.len();
    let all: Vec<usize> = (0..n).collect();
    let mut active: Vec<usize> = Vec::with_capacity(n);
    let mut iterations = 0;
    let threshold = |beta: &[f64]| tol * beta.iter().fold(1.0f64, |m, b| m.max(b.abs()));
    let record = |k: &K, beta: &[f64], trace: &mut Option<&mut Vec<f64>>| {
        if let Some(t) = trace.as_deref_mut() {
            let l1: f64 = beta.iter().map(|b| b.abs()).sum();
            t.push(k.loss(beta) + 2.0 * lambda * l1);
        }
    };
    record(k, beta, &mut trace);
    loop {
        let change = sweep(k, lambda, beta, &all);
        iterations += 1;
        record(k, beta, &mut trace);
        if change < threshold(beta) {
            return CdOutcome {
                iterations,
                converged: true,
            };
        }
        if iterations >= max_iter {
            return CdOutcome {
                iterations,
                converged: false,
            };
        }
        // Cycle over the current support until it settles, then re-check all.
        active.clear();
        active.extend((0..n).filter(|&j| beta[j] != 0.0));
        loop {
            let change = sweep(k, lambda, beta, &active);
            iterations += 1;
            record(k, beta, &mut trace);
            if change < threshold(beta) || iterations >= max_iter {
                break;
            }
        }
        if iterations >= max_iter {
            // One last full sweep decides convergence.
            let change = sweep(k, lambda, beta, &all);
            iterations += 1;
            record(k, beta, &mut trace);
            return CdOutcome {
                iterations,
                converged: change < threshold(beta),
            };
        }
    }
}

// ---------------------------------------------------------------------------
// Problems over a shared design
// ---------------------------------------------------------------------------

/// What is regressed on the selected columns.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Response {
    Y,
    Column(usize),
}

/// A lasso problem over a subset of the columns of a dataset, optionally
/// sharing a precomputed Gram matrix with other problems on the same design.
pub(crate) struct Problem<'a> {
    data: &'a Dataset,
    gram: Option<&'a Array2<f64>>,
    response: Response,
    cols: Vec<usize>,
    c: Vec<f64>,
}

impl<'a> Problem<'a> {
    pub(crate) fn new(data: &'a Dataset, gram: Option<&'a Array2<f64>>, response: Response, cols: Vec<usize>) -> Self {
        let inv_t = 1.0 / data.t() as f64;
        let c = match (response, gram) {
            (Response::Column(j), Some(g)) => cols.iter().map(|&k| g[[k, j]]).collect(),
            _ => {
                let resp = Self::response_slice(data, response);
                cols.iter().map(|&k| dot(data.col_slice(k), resp) * inv_t).collect()
            }
        };
        Self {
            data,
            gram,
            response,
            cols,
            c,
        }
    }

    fn response_slice(data: &Dataset, response: Response) -> &[f64] {
        match response {
            Response::Y => data.y_slice(),
            Response::Column(j) => data.col_slice(j),
        }
    }

    pub(crate) fn t(&self) -> usize {
        self.data.t()
    }

    pub(crate) fn n(&self) -> usize {
        self.cols.len()
    }

    pub(crate) fn response(&self) -> &[f64] {
        Self::response_slice(self.data, self.response)
    }

    /// `maxⱼ |x_j'resp|/T`, the smallest λ with an all-zero solution.
    pub(crate) fn lambda_max(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub(crate) fn fit(&self, lambda: f64, config: &SolverConfig, warm: Option<&[f64]>) -> Result<LassoFit> {
        self.fit_traced(lambda, config, warm, None)
    }

    pub(crate) fn fit_traced(
        &self,
        lambda: f64,
        config: &SolverConfig,
        warm: Option<&[f64]>,
        trace: Option<&mut Vec<f64>>,
    ) -> Result<LassoFit> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidConfig(format!("lambda must be >= 0, got {lambda}")));
        }
        let n = self.n();
        let mut beta = match warm {
            Some(w) if w.len() != n => {
                return Err(Error::DimensionMismatch {
                    expected: format!("warm start of length {n}"),
                    got: format!("length {}", w.len()),
                })
            }
            Some(w) => w.to_vec(),
            None => vec![0.0; n],
        };
        let resp = self.response();
        let inv_t = 1.0 / self.t() as f64;

        let outcome = match self.gram {
            Some(g) => {
                let yy = dot(resp, resp) * inv_t;
                let mut k = GramKernel::new(g, &self.cols, self.c.clone(), yy, &beta);
                self.pin_degenerate(&k, lambda, &mut beta)?;
                run_cd(&mut k, lambda, &mut beta, config.tol, config.max_iter, trace)
            }
            None => {
                let cols = self.cols.iter().map(|&k| self.data.col_slice(k)).collect();
                let mut k = ResidualKernel::new(cols, resp, &beta);
                self.pin_degenerate(&k, lambda, &mut beta)?;
                run_cd(&mut k, lambda, &mut beta, config.tol, config.max_iter, trace)
            }
        };

        let mut residuals = resp.to_vec();
        for (&k, &b) in self.cols.iter().zip(&beta) {
            if b != 0.0 {
                axpy(-b, self.data.col_slice(k), &mut residuals);
            }
        }
        let support: Vec<usize> = (0..n).filter(|&j| beta[j] != 0.0).collect();
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        let objective = dot(&residuals, &residuals) * inv_t + 2.0 * lambda * l1;
        let eligible = support.len() <= config.support_cap(self.t());
        Ok(LassoFit {
            beta: Array1::from(beta),
            lambda,
            residuals: Array1::from(residuals),
            support,
            objective,
            iterations: outcome.iterations,
            converged: outcome.converged,
            eligible,
            intercept: 0.0,
        })
    }

    fn pin_degenerate<K: Kernel>(&self, k: &K, lambda: f64, beta: &mut [f64]) -> Result<()> {
        for (j, b) in beta.iter_mut().enumerate().take(k.len()) {
            if k.col_sq(j) == 0.0 {
                if lambda == 0.0 {
                    return Err(Error::ZeroVarianceColumn(self.cols[j]));
                }
                *b = 0.0;
            }
        }
        Ok(())
    }

    pub(crate) fn path(&self, grid: &[f64], config: &SolverConfig) -> Result<Vec<LassoFit>> {
        check_decreasing(grid)?;
        let mut fits: Vec<LassoFit> = Vec::with_capacity(grid.len());
        for &lambda in grid {
            let warm = fits.last().map(|f| f.beta.as_slice().expect("contiguous"));
            let fit = self.fit(lambda, config, warm)?;
            let stop = config.truncate_path && !fit.eligible;
            fits.push(fit);
            if stop {
                break;
            }
        }
        Ok(fits)
    }

    pub(crate) fn grid(&self, grid_size: usize) -> Vec<f64> {
        grid_from_max(self.lambda_max(), self.t(), grid_size)
    }
}

fn check_decreasing(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty lambda grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidConfig("lambda grid must be strictly decreasing".into()));
    }
    if grid.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::InvalidConfig("lambda values must be nonnegative".into()));
    }
    Ok(())
}

/// Whether the design is large enough that a shared Gram matrix pays off.
pub(crate) fn gram_for(data: &Dataset, config: &SolverConfig) -> Option<Array2<f64>> {
    config.use_gram(data.n()).then(|| data.gram())
}

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

/// Fits the lasso at a single penalty level.
///
/// A fit that exhausts `max_iter` is returned with `converged = false`; use
/// [`LassoFit::check_converged`] to turn that into an error.
pub fn fit_lasso(data: &Dataset, lambda: f64, config: &SolverConfig, warm_start: Option<&[f64]>) -> Result<LassoFit> {
    config.validate()?;
    if config.standardize {
        let std = Standardized::new(data)?;
        let warm = warm_start.map(|w| std.to_scaled(w));
        let fit = std.problem(config).fit(lambda, config, warm.as_deref())?;
        return Ok(std.back_transform(fit, data));
    }
    // A single fit does not amortize the O(N²T) Gram matrix.
    Problem::new(data, None, Response::Y, (0..data.n()).collect()).fit(lambda, config, warm_start)
}

/// Log-equispaced grid from `λ_max = maxⱼ|x_j'y|/T` down to
/// `max((10T)⁻¹, 1e−4·λ_max)`, largest first.
pub fn lambda_grid(data: &Dataset, grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::InvalidConfig("grid_size must be at least 2".into()));
    }
    let lmax = data.xt_times(data.y_slice()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if lmax == 0.0 {
        return Err(Error::DegenerateGrid);
    }
    Ok(grid_from_max(lmax, data.t(), grid_size))
}

/// Grid construction shared by the main and nodewise regressions. With
/// `lmax = 0` the single value `(10T)⁻¹` is returned.
pub(crate) fn grid_from_max(lmax: f64, t: usize, grid_size: usize) -> Vec<f64> {
    let floor = 1.0 / (10.0 * t as f64);
    if lmax == 0.0 {
        return vec![floor];
    }
    let mut lmin = floor.max(1e-4 * lmax);
    if lmin >= lmax {
        lmin = 1e-4 * lmax;
    }
    let k = grid_size.max(2);
    let ratio = (lmin / lmax).ln();
    let mut grid: Vec<f64> = (0..k)
        .map(|i| lmax * (ratio * i as f64 / (k - 1) as f64).exp())
        .collect();
    grid[0] = lmax;
    grid[k - 1] = lmin;
    grid
}

/// Warm-started lasso path over a strictly decreasing grid.
pub fn fit_path(data: &Dataset, grid: &[f64], config: &SolverConfig) -> Result<Vec<LassoFit>> {
    config.validate()?;
    if config.standardize {
        let std = Standardized::new(data)?;
        let fits = std.problem(config).path(grid, config)?;
        return Ok(fits.into_iter().map(|f| std.back_transform(f, data)).collect());
    }
    let gram = gram_for(data, config);
    Problem::new(data, gram.as_ref(), Response::Y, (0..data.n()).collect()).path(grid, config)
}

/// Information criterion used to pick λ along a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Aic,
    #[default]
    Bic,
    /// Extended BIC with parameter γ.
    Ebic(f64),
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Criterion::Aic => write!(f, "aic"),
            Criterion::Bic => write!(f, "bic"),
            Criterion::Ebic(g) => write!(f, "ebic({g})"),
        }
    }
}

/// Gaussian-profile criterion value from a residual sum of squares.
pub fn information_criterion(rss: f64, k: usize, criterion: Criterion, n: usize, t: usize) -> f64 {
    let tf = t as f64;
    let kf = k as f64;
    let base = tf * (rss.max(1e-300) / tf).ln();
    match criterion {
        Criterion::Aic => base + 2.0 * kf,
        Criterion::Bic => base + kf * tf.ln(),
        Criterion::Ebic(gamma) => base + kf * tf.ln() + 2.0 * gamma * kf * (n as f64).ln(),
    }
}

/// Index of the eligible fit minimizing the criterion; ties go to the larger λ.
pub fn select_index(path: &[LassoFit], criterion: Criterion, n: usize, t: usize) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, fit) in path.iter().enumerate() {
        if !fit.eligible {
            continue;
        }
        let ic = information_criterion(fit.rss(), fit.df(), criterion, n, t);
        let better = match best {
            None => true,
            Some((b, bic)) => ic < bic || (ic == bic && fit.lambda > path[b].lambda),
        };
        if better {
            best = Some((i, ic));
        }
    }
    best.map(|(i, _)| i).ok_or(Error::NoEligibleFit)
}

/// The eligible fit minimizing the criterion.
pub fn select_by_ic(path: &[LassoFit], criterion: Criterion, n: usize, t: usize) -> Result<&LassoFit> {
    if path.is_empty() {
        return Err(Error::InvalidConfig("empty path".into()));
    }
    select_index(path, criterion, n, t).map(|i| &path[i])
}

/// Grid + path + IC selection in one call; a degenerate grid falls back to the
/// single value `(10T)⁻¹`.
pub fn fit_auto(data: &Dataset, criterion: Criterion, config: &SolverConfig) -> Result<LassoFit> {
    let grid = match lambda_grid(data, config.grid_size) {
        Ok(g) => g,
        Err(Error::DegenerateGrid) => grid_from_max(0.0, data.t(), 1),
        Err(e) => return Err(e),
    };
    let path = fit_path(data, &grid, config)?;
    select_by_ic(&path, criterion, data.n(), data.t()).cloned()
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct Standardized {
    data: Dataset,
    x_mean: Vec<f64>,
    x_scale: Vec<f64>,
    y_mean: f64,
}

impl Standardized {
    fn new(data: &Dataset) -> Result<Self> {
        let t = data.t() as f64;
        let y_mean = data.y().sum() / t;
        let mut x = data.x().clone();
        let mut x_mean = Vec::with_capacity(data.n());
        let mut x_scale = Vec::with_capacity(data.n());
        for mut col in x.columns_mut() {
            let m = col.sum() / t;
            col.mapv_inplace(|v| v - m);
            let sd = (col.dot(&col) / t).sqrt();
            let s = if sd > 0.0 { sd } else { 1.0 };
            col.mapv_inplace(|v| v / s);
            x_mean.push(m);
            x_scale.push(s);
        }
        let y = data.y().mapv(|v| v - y_mean);
        Ok(Self {
            data: Dataset::new(y, x)?,
            x_mean,
            x_scale,
            y_mean,
        })
    }

    fn problem(&self, config: &SolverConfig) -> OwnedProblem<'_> {
        OwnedProblem {
            data: &self.data,
            gram: gram_for(&self.data, config),
        }
    }

    fn to_scaled(&self, beta: &[f64]) -> Vec<f64> {
        beta.iter().zip(&self.x_scale).map(|(b, s)| b * s).collect()
    }

    fn back_transform(&self, mut fit: LassoFit, original: &Dataset) -> LassoFit {
        for (b, s) in fit.beta.iter_mut().zip(&self.x_scale) {
            *b /= s;
        }
        fit.intercept = self.y_mean - fit.beta.iter().zip(&self.x_mean).map(|(b, m)| b * m).sum::<f64>();
        let fitted = original.x_times(fit.beta.as_slice().expect("contiguous"));
        fit.residuals = original.y() - &fitted - fit.intercept;
        fit
    }
}

struct OwnedProblem<'a> {
    data: &'a Dataset,
    gram: Option<Array2<f64>>,
}

impl OwnedProblem<'_> {
    fn as_problem(&self) -> Problem<'_> {
        Problem::new(self.data, self.gram.as_ref(), Response::Y, (0..self.data.n()).collect())
    }

    fn fit(&self, lambda: f64, config: &SolverConfig, warm: Option<&[f64]>) -> Result<LassoFit> {
        self.as_problem().fit(lambda, config, warm)
    }

    fn path(&self, grid: &[f64], config: &SolverConfig) -> Result<Vec<LassoFit>> {
        self.as_problem().path(grid, config)
    }
}

/// Objective values after every sweep, for monotonicity checks.
#[cfg(test)]
pub(crate) fn objective_trace(data: &Dataset, lambda: f64, config: &SolverConfig, gram: bool) -> Vec<f64> {
    let g = gram.then(|| data.gram());
    let mut trace = Vec::new();
    Problem::new(data, g.as_ref(), Response::Y, (0..data.n()).collect())
        .fit_traced(lambda, config, None, Some(&mut trace))
        .unwrap();
    trace
}


/// Penalty choice for a regression: a fixed value or IC selection on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaChoice {
    Fixed(f64),
    Auto(Criterion),
}

impl Default for LambdaChoice {
    fn default() -> Self {
        LambdaChoice::Auto(Criterion::Bic)
    }
}

impl Problem<'_> {
    /// Fixed-λ fit or grid + path + IC selection, depending on `choice`.
    pub(crate) fn solve(&self, choice: LambdaChoice, config: &SolverConfig) -> Result<LassoFit> {
        match choice {
            LambdaChoice::Fixed(lambda) => self.fit(lambda, config, None),
            LambdaChoice::Auto(criterion) => {
                let grid = self.grid(config.grid_size);
                let path = self.path(&grid, config)?;
                select_by_ic(&path, criterion, self.n(), self.t()).cloned()
            }
        }
    }
}
