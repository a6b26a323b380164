//! Distribution functions used by the inference layer.
//!
//! Normal and chi-square routines delegate to `statrs`; the Kolmogorov-Smirnov
//! test is used by the simulation checks of the standardized statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal is valid")
}

pub fn normal_cdf(x: f64) -> f64 {
    standard_normal().cdf(x)
}

/// Φ⁻¹(p) for p in (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    standard_normal().inverse_cdf(p)
}

/// Two-sided critical value `z_{α/2} = Φ⁻¹(1 − α/2)`; zero at α = 1.
pub fn z_critical(alpha: f64) -> f64 {
    if alpha >= 1.0 {
        0.0
    } else {
        normal_quantile(1.0 - alpha / 2.0)
    }
}

/// χ²_P distribution function.
pub fn chi2_cdf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ChiSquared::new(dof as f64).expect("positive dof").cdf(x)
}

/// Upper-tail probability `1 − F_P(x)`, clamped to [0, 1].
pub fn chi2_sf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).expect("positive dof").sf(x).clamp(0.0, 1.0)
}

pub fn chi2_quantile(p: f64, dof: usize) -> f64 {
    ChiSquared::new(dof as f64).expect("positive dof").inverse_cdf(p)
}

/// One-sample Kolmogorov-Smirnov test result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// KS test of `sample` against a continuous CDF, with Stephens' small-sample
/// correction applied to the asymptotic Kolmogorov distribution.
pub fn ks_test(sample: &[f64], cdf: impl Fn(f64) -> f64) -> KsTest {
    let mut xs: Vec<f64> = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let en = n.sqrt();
    KsTest {
        statistic: d,
        p_value: kolmogorov_sf((en + 0.12 + 0.11 / en) * d),
    }
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let a2 = -2.0 * lambda * lambda;
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut prev = 0.0f64;
    for k in 1..=200 {
        let kf = k as f64;
        let term = sign * 2.0 * (a2 * kf * kf).exp();
        sum += term;
        if term.abs() <= 1e-12 * prev.abs() || term.abs() <= 1e-300 {
            return sum.clamp(0.0, 1.0);
        }
        sign = -sign;
        prev = term;
    }
    1.0
}
