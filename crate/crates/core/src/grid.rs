//! Price grids.

use crate::dist::DemandDistribution;
use crate::error::{Error, Result};

/// Survival level below which the tail is treated as numerically empty.
pub const TAIL_FLOOR: f64 = 1e-12;

pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    v[n - 1] = b;
    v
}

pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    let mut v: Vec<f64> = lin_space(la, lb, n).into_iter().map(f64::exp).collect();
    v[0] = a;
    v[n - 1] = b;
    v
}

/// Sorts, drops non-finite values and exact duplicates.
pub fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|x| x.is_finite());
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `n` points from the 0.001 to the 0.999 quantile, clipped to `(0, H)`:
/// log-spaced for unbounded support, linear otherwise.
pub fn analysis_grid(dist: &DemandDistribution, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    let hi = dist.quantile(0.999)?;
    let mut lo = dist.quantile(0.001)?;
    if !(lo > 0.0) {
        lo = hi * 1e-6;
    }
    let h = dist.upper();
    let hi = if hi < h { hi } else { h * (1.0 - 1e-12) };
    if !(hi > lo) {
        return Err(Error::Domain(format!("degenerate grid [{lo}, {hi}]")));
    }
    Ok(if h.is_finite() { lin_space(lo, hi, n) } else { log_space(lo, hi, n) })
}

/// Doublings of `from` inside the numerical support, for tail probing.
pub fn tail_extension(dist: &DemandDistribution, from: f64, max_doublings: usize) -> Vec<f64> {
    let mut out = Vec::new();
    if dist.upper().is_finite() || !(from > 0.0) {
        return out;
    }
    let mut p = from;
    for _ in 0..max_doublings {
        p *= 2.0;
        if !(dist.survival(p) >= TAIL_FLOOR) {
            break;
        }
        out.push(p);
    }
    out
}
