//! Monte Carlo and finite-difference cross-checks of the analytic quantities.

use serde::Serialize;

use crate::dist::DemandDistribution;
use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::reliability;

pub const MIN_SAMPLES: usize = 1000;

/// z-score bound for a single check.
pub const Z_PASS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Mean and standard error of `xs`, summed in index order.
    pub fn from_values(xs: &[f64], seed: u64) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        let var = if n > 1 { ss / (n - 1) as f64 } else { 0.0 };
        Self { value: mean, stderr: (var / n as f64).sqrt(), n, seed }
    }
}

/// Sample mean of `(α − p)₊`.
pub fn estimate_surplus(dist: &DemandDistribution, p: f64, n: usize, seed: u64) -> Result<McEstimate> {
    if n < MIN_SAMPLES {
        return Err(Error::Domain(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    if p >= dist.upper() {
        return Ok(McEstimate { value: 0.0, stderr: 0.0, n, seed });
    }
    let xs: Vec<f64> = dist.sample(seed, n)?.into_iter().map(|a| (a - p).max(0.0)).collect();
    Ok(McEstimate::from_values(&xs, seed))
}

/// Sample estimate of `P(α > x)`.
pub fn estimate_survival(dist: &DemandDistribution, x: f64, n: usize, seed: u64) -> Result<McEstimate> {
    if n < MIN_SAMPLES {
        return Err(Error::Domain(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    let xs: Vec<f64> = dist.sample(seed, n)?.into_iter().map(|a| f64::from(u8::from(a > x))).collect();
    Ok(McEstimate::from_values(&xs, seed))
}

/// One analytic-versus-simulation comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub p: f64,
    pub analytic: f64,
    pub mc: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(check: impl Into<String>, p: f64, analytic: f64, mc: f64, stderr: f64) -> Self {
        let diff = mc - analytic;
        let z = if stderr > 0.0 {
            diff / stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        Self { check: check.into(), p, analytic, mc, stderr, z, pass: z.abs() <= Z_PASS }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("check serialization cannot fail")
    }
}

/// Compares `p · E(α − p)₊` from samples with the analytic revenue.
pub fn validate_revenue(dist: &DemandDistribution, p: f64, n: usize, seed: u64) -> Result<Check> {
    let est = estimate_surplus(dist, p, n, seed)?;
    let analytic = reliability::expected_revenue(dist, p)?;
    Ok(Check::new("revenue", p, analytic, p * est.value, p * est.stderr))
}

/// `|[S(p+h) − S(p−h)]/(2h) + F̄(p)|` with `S(p) = E(α − p)₊`.
///
/// Analytic surpluses are differenced directly. Quadrature-based ones share
/// the tail beyond `p + h`, so only `∫_{p−h}^{p+h} F̄` is computed for the
/// difference; differencing two independent tail integrals would leave a
/// quadrature error of order `rel_tol/h`.
pub fn surplus_derivative_residual(dist: &DemandDistribution, p: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !(p - h > 0.0) || (dist.upper().is_finite() && !(p + h < dist.upper())) {
        return Err(Error::Domain(format!("need 0 < p - h and p + h < H, got p = {p}, h = {h}")));
    }
    let (s_plus, s_minus) = match (dist.structural_excess(p + h), dist.structural_excess(p - h)) {
        (Some(a), Some(b)) => (a?, b?),
        _ => {
            let s_plus = dist.expected_excess(p + h)?;
            let tol = Tolerance::new(1e-15, 1e-13);
            let inner = quad::integrate_with_breaks(|u| dist.survival(u), p - h, p + h, dist.breakpoints(), tol)?;
            (s_plus, s_plus + inner.value)
        }
    };
    let diff = s_plus - s_minus;
    let size = s_plus.abs().max(s_minus.abs());
    if diff.abs() <= 100.0 * f64::EPSILON * size {
        return Err(Error::StepTooSmall { p, h });
    }
    Ok((diff / (2.0 * h) + dist.survival(p)).abs())
}
