//! The three designs: block-diagonal ARDL (IID or GARCH errors), an AR(1)
//! factor model and a weakly sparse VAR(1) fitted as a VAR(2).

use ndarray::{s, Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    sparsity, stream, ErrorLaw, NullMode, Parameter, ScenarioConfig, ScenarioKind, Simulated, EXPERIMENT_STREAM,
};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::Restriction;
use crate::linalg::spectral_radius;

pub const RHO_ARDL: f64 = 0.6;
pub const A1_ENTRY: f64 = 0.15;
pub const A4_ENTRY: f64 = -0.1;
pub const BLOCK: usize = 5;
pub const GARCH_OMEGA: f64 = 5e-4;
pub const GARCH_BETA: f64 = 0.9;
pub const GARCH_ALPHA: f64 = 0.05;
/// Unconditional variance `ω/(1 − α − β)`.
pub const GARCH_H0: f64 = GARCH_OMEGA / (1.0 - GARCH_ALPHA - GARCH_BETA);
pub const FACTOR_AR: f64 = 0.5;
pub const RHO_VAR: f64 = 0.4;

/// GARCH(1,1) state: `h_t = ω + β h_{t−1} + α u²_{t−1}`, `u_t = √h_t ε_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Garch {
    h: f64,
    u_sq: f64,
}

impl Default for Garch {
    fn default() -> Self {
        Self {
            h: GARCH_H0,
            u_sq: GARCH_H0,
        }
    }
}

impl Garch {
    pub fn step(&mut self, eps: f64) -> f64 {
        self.h = GARCH_OMEGA + GARCH_BETA * self.h + GARCH_ALPHA * self.u_sq;
        let u = self.h.sqrt() * eps;
        self.u_sq = u * u;
        u
    }

    pub fn variance(&self) -> f64 {
        self.h
    }
}

/// `β_j = (−1)^j/√s` for `j ≤ s`, zero after, over `len` entries.
fn alternating(len: usize, s: usize) -> Array1<f64> {
    let s = s.min(len);
    let scale = 1.0 / (s as f64).sqrt();
    Array1::from_shape_fn(len, |i| {
        if i < s {
            if (i + 1) % 2 == 0 {
                scale
            } else {
                -scale
            }
        } else {
            0.0
        }
    })
}

/// Slopes on `x_{t−1}` for the ARDL design with `n` regressors in total.
pub fn ardl_coefficients(n: usize) -> Array1<f64> {
    alternating(n - 1, sparsity(n))
}

/// `k×k` block-diagonal matrix with constant `BLOCK×BLOCK` blocks.
pub fn block_constant(k: usize, value: f64) -> Array2<f64> {
    Array2::from_shape_fn((k, k), |(i, j)| if i / BLOCK == j / BLOCK { value } else { 0.0 })
}

/// Dispatch on the scenario kind.
pub fn simulate(config: &ScenarioConfig, rep: usize) -> Result<Simulated> {
    match config.kind {
        ScenarioKind::ArdlBlockDiag(_) => simulate_ardl(config, rep),
        ScenarioKind::Factor => simulate_factor(config, rep),
        ScenarioKind::Var1(_) => simulate_var1(config, rep),
    }
}

fn normal_source(config: &ScenarioConfig, rep: usize) -> impl FnMut() -> f64 {
    let mut rng = config.rng(rep);
    move || rng.sample(StandardNormal)
}

/// `y_t = ρy_{t−1} + β'x_{t−1} + u_t`, `x_t = A₁x_{t−1} + A₄x_{t−4} + ν_t`;
/// regressors are `(y_{t−1}, x_{t−1}')`.
pub fn simulate_ardl(config: &ScenarioConfig, rep: usize) -> Result<Simulated> {
    config.validate()?;
    let ScenarioKind::ArdlBlockDiag(law) = config.kind else {
        return Err(Error::InvalidConfig(format!("{} is not an ARDL scenario", config.kind)));
    };
    ardl_from(config.n, config.t, config.burn_in, law, &mut normal_source(config, rep))
}

pub(crate) fn ardl_from(
    n: usize,
    t: usize,
    burn_in: usize,
    law: ErrorLaw,
    draw: &mut dyn FnMut() -> f64,
) -> Result<Simulated> {
    let k = n - 1;
    let len = burn_in + t + 1;
    let slopes = ardl_coefficients(n);
    let mut garch = vec![Garch::default(); if law == ErrorLaw::Garch { n } else { 0 }];
    let mut shock = |i: usize, draw: &mut dyn FnMut() -> f64| {
        let e = draw();
        match law {
            ErrorLaw::Iid => e,
            ErrorLaw::Garch => garch[i].step(e),
        }
    };
    let mut x = Array2::<f64>::zeros((len, k));
    let mut y = vec![0.0; len];
    let mut u = vec![0.0; len];
    for s in 0..len {
        u[s] = shock(0, draw);
        for b in 0..k / BLOCK {
            let cols = b * BLOCK..(b + 1) * BLOCK;
            let lag_sum = |l: usize| {
                if s >= l {
                    x.slice(s![s - l, cols.clone()]).sum()
                } else {
                    0.0
                }
            };
            let mean = A1_ENTRY * lag_sum(1) + A4_ENTRY * lag_sum(4);
            for j in cols.clone() {
                x[[s, j]] = mean + shock(j + 1, draw);
            }
        }
        y[s] = u[s];
        if s >= 1 {
            y[s] += RHO_ARDL * y[s - 1] + slopes.dot(&x.row(s - 1));
        }
    }
    let rows = burn_in + 1..len;
    let mut design = Array2::<f64>::zeros((t, n));
    for (i, r) in rows.clone().enumerate() {
        design[[i, 0]] = y[r - 1];
        design.slice_mut(s![i, 1..]).assign(&x.row(r - 1));
    }
    let data = Dataset::new(rows.clone().map(|r| y[r]).collect(), design)?;
    let mut beta = Array1::zeros(n);
    beta[0] = RHO_ARDL;
    beta.slice_mut(s![1..]).assign(&slopes);
    let mut parameters = vec![Parameter {
        name: "rho".into(),
        index: 0,
        value: RHO_ARDL,
    }];
    parameters.extend((0..sparsity(n).min(k)).map(|i| Parameter {
        name: format!("beta{}", i + 1),
        index: i + 1,
        value: slopes[i],
    }));
    Ok(Simulated {
        data,
        beta,
        u: rows.map(|r| u[r]).collect(),
        parameters,
        restriction: None,
    })
}

/// Factor loadings drawn once per experiment from Uniform(0, 1).
pub fn factor_loadings(config: &ScenarioConfig) -> Array1<f64> {
    let mut rng = stream(config.seed, EXPERIMENT_STREAM);
    (0..config.n).map(|_| rng.random::<f64>()).collect()
}

/// `y_t = β'x_t + u_t`, `x_t = λf_t + ν_t`, `f_t = 0.5f_{t−1} + ε_t`.
pub fn simulate_factor(config: &ScenarioConfig, rep: usize) -> Result<Simulated> {
    config.validate()?;
    simulate_factor_with_loadings(config, rep, &factor_loadings(config))
}

pub fn simulate_factor_with_loadings(config: &ScenarioConfig, rep: usize, loadings: &Array1<f64>) -> Result<Simulated> {
    config.validate()?;
    if loadings.len() != config.n {
        return Err(Error::DimensionMismatch {
            expected: format!("{} loadings", config.n),
            got: loadings.len().to_string(),
        });
    }
    factor_from(
        config.n,
        config.t,
        config.burn_in,
        loadings,
        &mut normal_source(config, rep),
    )
}

pub(crate) fn factor_from(
    n: usize,
    t: usize,
    burn_in: usize,
    loadings: &Array1<f64>,
    draw: &mut dyn FnMut() -> f64,
) -> Result<Simulated> {
    let s = (sparsity(n) + 1).min(n);
    let beta = alternating(n, s);
    let mut x = Array2::<f64>::zeros((t, n));
    let mut y = Array1::<f64>::zeros(t);
    let mut u = Array1::<f64>::zeros(t);
    let mut f = 0.0;
    let mut row = Array1::<f64>::zeros(n);
    for step in 0..burn_in + t {
        f = FACTOR_AR * f + draw();
        for j in 0..n {
            row[j] = loadings[j] * f + draw();
        }
        let e = draw();
        if step >= burn_in {
            let i = step - burn_in;
            x.row_mut(i).assign(&row);
            y[i] = beta.dot(&row) + e;
            u[i] = e;
        }
    }
    let parameters = (0..s)
        .map(|i| Parameter {
            name: format!("beta{}", i + 1),
            index: i,
            value: beta[i],
        })
        .collect();
    Ok(Simulated {
        data: Dataset::new(y, x)?,
        beta,
        u,
        parameters,
        restriction: None,
    })
}

/// `A₁^{(j,k)} = (−1)^{|j−k|} ρ^{|j−k|+1}`; the size mode zeroes `A₁^{(1,2)}`.
pub fn var1_matrix(m: usize, mode: NullMode) -> Array2<f64> {
    let mut a = Array2::from_shape_fn((m, m), |(j, k)| {
        let d = j.abs_diff(k) as i32;
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        sign * RHO_VAR.powi(d + 1)
    });
    if mode == NullMode::Size && m > 1 {
        a[[0, 1]] = 0.0;
    }
    a
}

/// `z_t = A₁z_{t−1} + u_t` of dimension `N/2`; the returned data regress
/// `z_{1,t}` on `(z'_{t−1}, z'_{t−2})'` with the Granger restriction on the
/// lag-1 and lag-2 coefficients of `z₂`.
pub fn simulate_var1(config: &ScenarioConfig, rep: usize) -> Result<Simulated> {
    config.validate()?;
    let ScenarioKind::Var1(mode) = config.kind else {
        return Err(Error::InvalidConfig(format!("{} is not a VAR scenario", config.kind)));
    };
    let a = var1_matrix(config.n / 2, mode);
    let radius = spectral_radius(&a);
    if !(radius < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "VAR matrix is not stable (spectral radius {radius})"
        )));
    }
    var1_from(&a, config.t, config.burn_in, &mut normal_source(config, rep))
}

pub(crate) fn var1_from(a: &Array2<f64>, t: usize, burn_in: usize, draw: &mut dyn FnMut() -> f64) -> Result<Simulated> {
    let m = a.nrows();
    let len = burn_in + t + 2;
    let mut z = Array2::<f64>::zeros((len, m));
    let mut u = Array2::<f64>::zeros((len, m));
    for s in 0..len {
        for j in 0..m {
            u[[s, j]] = draw();
        }
        let mut next = u.row(s).to_owned();
        if s >= 1 {
            next += &a.dot(&z.row(s - 1));
        }
        z.row_mut(s).assign(&next);
    }
    let rows = burn_in + 2..len;
    let mut design = Array2::<f64>::zeros((t, 2 * m));
    for (i, r) in rows.clone().enumerate() {
        design.slice_mut(s![i, ..m]).assign(&z.row(r - 1));
        design.slice_mut(s![i, m..]).assign(&z.row(r - 2));
    }
    let data = Dataset::new(rows.clone().map(|r| z[[r, 0]]).collect(), design)?;
    let mut beta = Array1::zeros(2 * m);
    beta.slice_mut(s![..m]).assign(&a.row(0));
    let h = vec![1, m + 1];
    let restriction = Restriction::new(h.clone(), Array2::eye(2), Array1::zeros(2))?;
    let parameters = vec![
        Parameter {
            name: "a1_12".into(),
            index: h[0],
            value: a[[0, 1]],
        },
        Parameter {
            name: "a2_12".into(),
            index: h[1],
            value: 0.0,
        },
    ];
    Ok(Simulated {
        data,
        beta,
        u: rows.map(|r| u[[r, 0]]).collect(),
        parameters,
        restriction: Some(restriction),
    })
}
