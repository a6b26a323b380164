//! Confidence intervals, standardized statistics and Wald tests built from a
//! desparsified estimate and its HAC variance.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::desparsify::DesparsifiedEstimate;
use crate::error::{Error, Result};
use crate::hac::{sandwich_psi, HacEstimate};
use crate::linalg::{condition_number, Cholesky};
use crate::nodewise::MAX_CONDITION;
use crate::stats::{chi2_sf, z_critical};

/// Linear restrictions `R β_H = q` over the columns in `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Restriction {
    pub h: Vec<usize>,
    /// P×h, columns ordered as `h`.
    pub r: Array2<f64>,
    pub q: Array1<f64>,
}

impl Restriction {
    pub fn new(h: Vec<usize>, r: Array2<f64>, q: Array1<f64>) -> Result<Self> {
        let (p, cols) = r.dim();
        if p == 0 {
            return Err(Error::InvalidRestriction("need at least one row".into()));
        }
        if cols != h.len() || q.len() != p {
            return Err(Error::InvalidRestriction(format!(
                "R is {p}x{cols}, q has {} entries, {} targets",
                q.len(),
                h.len()
            )));
        }
        if r.iter().chain(q.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidRestriction("non-finite entry".into()));
        }
        if r.rows().into_iter().any(|row| row.iter().all(|&v| v == 0.0)) {
            return Err(Error::InvalidRestriction("all-zero row".into()));
        }
        Ok(Self { h, r, q })
    }

    /// `β_j = value` for a single column.
    pub fn single(j: usize, value: f64) -> Self {
        Self {
            h: vec![j],
            r: Array2::ones((1, 1)),
            q: Array1::from_elem(1, value),
        }
    }

    pub fn p(&self) -> usize {
        self.r.nrows()
    }

    /// `R` expressed over the targets of `estimate`, in their order.
    fn aligned(&self, estimate_h: &[usize]) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((self.p(), estimate_h.len()));
        for (c, &j) in self.h.iter().enumerate() {
            let pos = estimate_h
                .iter()
                .position(|&k| k == j)
                .ok_or_else(|| Error::InvalidRestriction(format!("column {j} is not an inference target")))?;
            out.column_mut(pos).assign(&self.r.column(c));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldTest {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
    pub psi: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    pub h: Vec<usize>,
    pub b_h: Array1<f64>,
    pub se: Array1<f64>,
    pub ci_lower: Array1<f64>,
    pub ci_upper: Array1<f64>,
    /// Statistics against a zero null.
    pub z_stats: Array1<f64>,
    pub alpha: f64,
    pub bandwidth: usize,
    pub wald: Option<WaldTest>,
}

/// `√(ω̂_jj/τ̂_j⁴ / T)` for every target.
pub fn standard_errors(estimate: &DesparsifiedEstimate, hac: &HacEstimate) -> Result<Array1<f64>> {
    let t = estimate.t() as f64;
    Ok(hac.coordinate_variances()?.mapv(|v| (v.max(0.0) / t).sqrt()))
}

/// `b̂_j ± z_{α/2}·se_j`.
pub fn confidence_intervals(estimate: &DesparsifiedEstimate, hac: &HacEstimate, alpha: f64) -> Result<Vec<Interval>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let z = z_critical(alpha);
    let se = standard_errors(estimate, hac)?;
    Ok(estimate
        .b_h
        .iter()
        .zip(&se)
        .map(|(&b, &s)| Interval {
            lower: b - z * s,
            upper: b + z * s,
        })
        .collect())
}

/// `√T (b̂_j − null_j) / √(ω̂_jj/τ̂_j⁴)`.
pub fn z_statistics(
    estimate: &DesparsifiedEstimate,
    hac: &HacEstimate,
    null_values: &Array1<f64>,
) -> Result<Array1<f64>> {
    if null_values.len() != estimate.b_h.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} null values", estimate.b_h.len()),
            got: null_values.len().to_string(),
        });
    }
    let se = standard_errors(estimate, hac)?;
    Ok(estimate
        .b_h
        .iter()
        .zip(null_values)
        .zip(&se)
        .map(|((&b, &b0), &s)| (b - b0) / s)
        .collect())
}

/// `W = (R b̂ − q)' (Ψ̂/T)⁻¹ (R b̂ − q)` with a χ²_P p-value.
pub fn wald_test(estimate: &DesparsifiedEstimate, hac: &HacEstimate, restriction: &Restriction) -> Result<WaldTest> {
    let r = restriction.aligned(&estimate.h)?;
    let psi = sandwich_psi(&hac.omega, &hac.tau_sq_h, &r)?;
    let cond = condition_number(&psi);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularPsi(cond));
    }
    let chol = Cholesky::new(&psi).ok_or(Error::SingularPsi(f64::INFINITY))?;
    let d = r.dot(&estimate.b_h) - &restriction.q;
    let statistic = estimate.t() as f64 * chol.quad_form_inv(&d);
    let dof = restriction.p();
    Ok(WaldTest {
        statistic,
        p_value: chi2_sf(statistic, dof),
        dof,
        psi,
    })
}

/// Full report: estimates, standard errors, intervals, zero-null statistics and
/// an optional Wald test.
pub fn infer(
    estimate: &DesparsifiedEstimate,
    hac: &HacEstimate,
    alpha: f64,
    restriction: Option<&Restriction>,
) -> Result<InferenceReport> {
    let intervals = confidence_intervals(estimate, hac, alpha)?;
    let z_stats = z_statistics(estimate, hac, &Array1::zeros(estimate.b_h.len()))?;
    let wald = restriction.map(|r| wald_test(estimate, hac, r)).transpose()?;
    Ok(InferenceReport {
        h: estimate.h.clone(),
        b_h: estimate.b_h.clone(),
        se: standard_errors(estimate, hac)?,
        ci_lower: intervals.iter().map(|i| i.lower).collect(),
        ci_upper: intervals.iter().map(|i| i.upper).collect(),
        z_stats,
        alpha,
        bandwidth: hac.bandwidth,
        wald,
    })
}
