//! Mean residual demand and the functions derived from it.
//!
//! For a price `p` inside the support:
//!
//! * `m(p) = E(α − p)₊ / F̄(p)`, and `m(p) = 0` for `p ≥ H`
//! * `ℓ(p) = m(p)/p`, the inverse of the price elasticity `ε(p)`
//! * `h(p) = f(p)/F̄(p)` and `g(p) = p·h(p)`
//! * `R(p) = p·E(α − p)₊ = p·m(p)·F̄(p)`

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::NumericConfig;
use crate::dist::DemandDistribution;
use crate::error::{Error, Result};
use crate::grid;
use crate::quad::{self, Tolerance};

/// Survival values below this are treated as outside the numerical support.
pub const UNDERFLOW: f64 = 1e-300;

fn guarded_survival(dist: &DemandDistribution, p: f64) -> Result<f64> {
    let s = dist.survival(p);
    if s < UNDERFLOW {
        return Err(Error::BeyondSupport { p, survival: s });
    }
    Ok(s)
}

/// Scales the absolute tolerance with the tail mass so that `m` keeps its
/// relative accuracy deep in the tail.
fn tail_tolerance(tol: Tolerance, survival: f64) -> Tolerance {
    Tolerance::new(tol.abs * survival.clamp(UNDERFLOW, 1.0), tol.rel)
}

fn check_price(p: f64) -> Result<()> {
    if p.is_nan() || p < 0.0 {
        return Err(Error::Domain(format!("price must be nonnegative, got {p}")));
    }
    Ok(())
}

/// `E(α − p)₊` at the accuracy requested by `config`.
pub fn expected_excess(dist: &DemandDistribution, p: f64, config: &NumericConfig) -> Result<f64> {
    let s = dist.survival(p);
    dist.expected_excess_with(p, tail_tolerance(config.tolerance(), s))
}

pub fn mrd(dist: &DemandDistribution, p: f64) -> Result<f64> {
    mrd_with(dist, p, &NumericConfig::default())
}

pub fn mrd_with(dist: &DemandDistribution, p: f64, config: &NumericConfig) -> Result<f64> {
    check_price(p)?;
    if p >= dist.upper() {
        return Ok(0.0);
    }
    let s = guarded_survival(dist, p)?;
    Ok(expected_excess(dist, p, config)? / s)
}

pub fn gmrd(dist: &DemandDistribution, p: f64) -> Result<f64> {
    gmrd_with(dist, p, &NumericConfig::default())
}

pub fn gmrd_with(dist: &DemandDistribution, p: f64, config: &NumericConfig) -> Result<f64> {
    if !(p > 0.0 && p < dist.upper()) {
        return Err(Error::Domain(format!("gmrd needs 0 < p < H, got p = {p}")));
    }
    Ok(mrd_with(dist, p, config)? / p)
}

pub fn hazard(dist: &DemandDistribution, p: f64) -> Result<f64> {
    check_price(p)?;
    if !dist.has_density() {
        return Err(Error::MissingDensity(dist.label().to_string()));
    }
    if p >= dist.upper() {
        return Err(Error::Domain(format!("hazard needs p < H, got p = {p}")));
    }
    guarded_survival(dist, p)?;
    dist.hazard_rate(p).ok_or_else(|| Error::MissingDensity(dist.label().to_string()))
}

pub fn gfr(dist: &DemandDistribution, p: f64) -> Result<f64> {
    Ok(p * hazard(dist, p)?)
}

pub fn elasticity(dist: &DemandDistribution, p: f64) -> Result<f64> {
    Ok(1.0 / gmrd(dist, p)?)
}

pub fn elasticity_with(dist: &DemandDistribution, p: f64, config: &NumericConfig) -> Result<f64> {
    Ok(1.0 / gmrd_with(dist, p, config)?)
}

pub fn expected_revenue(dist: &DemandDistribution, p: f64) -> Result<f64> {
    expected_revenue_with(dist, p, &NumericConfig::default())
}

pub fn expected_revenue_with(dist: &DemandDistribution, p: f64, config: &NumericConfig) -> Result<f64> {
    check_price(p)?;
    if p >= dist.upper() {
        return Ok(0.0);
    }
    Ok(p * expected_excess(dist, p, config)?)
}

/// `m′(p) = h(p)·m(p) − 1`.
pub fn mrd_derivative(dist: &DemandDistribution, p: f64) -> Result<f64> {
    Ok(hazard(dist, p)? * mrd(dist, p)? - 1.0)
}

/// `E(α − p)₊` on a sorted grid.
///
/// Analytic tails are evaluated pointwise. Otherwise one tail integral is
/// taken from the last point and the rest is accumulated from the integrals
/// of `F̄` between neighbouring points, which costs one short quadrature per
/// grid cell instead of one tail integral per point.
pub fn excess_on_grid(dist: &DemandDistribution, grid: &[f64], config: &NumericConfig) -> Vec<Result<f64>> {
    if grid.is_empty() {
        return Vec::new();
    }
    if dist.structural_excess(grid[0]).is_some() {
        return grid.par_iter().map(|&p| expected_excess(dist, p, config)).collect();
    }
    let n = grid.len();
    let tol = config.tolerance();
    let cells: Vec<Result<f64>> = grid
        .par_windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1].min(dist.upper()));
            if b <= a {
                return Ok(0.0);
            }
            let s = dist.survival(b);
            let breaks: Vec<f64> = dist.breakpoints().iter().copied().filter(|&x| x > a && x < b).collect();
            quad::integrate_with_breaks(|u| dist.survival(u), a, b, &breaks, tail_tolerance(tol, s)).map(|e| e.value)
        })
        .collect();
    let mut out = vec![Ok(0.0); n];
    let mut acc = expected_excess(dist, grid[n - 1], config);
    out[n - 1] = acc.clone();
    for i in (0..n - 1).rev() {
        acc = match (&acc, &cells[i]) {
            (Ok(t), Ok(c)) => Ok(t + c),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        };
        out[i] = acc.clone();
    }
    out
}

/// A function that can be sampled on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Column {
    M,
    L,
    H,
    G,
    Eps,
    R,
}

impl Column {
    pub const ALL: [Column; 6] = [Column::M, Column::L, Column::H, Column::G, Column::Eps, Column::R];

    pub fn header(self) -> &'static str {
        match self {
            Column::M => "m",
            Column::L => "l",
            Column::H => "h",
            Column::G => "g",
            Column::Eps => "eps",
            Column::R => "R",
        }
    }

    pub fn needs_density(self) -> bool {
        matches!(self, Column::H | Column::G)
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "m" => Ok(Column::M),
            "l" => Ok(Column::L),
            "h" => Ok(Column::H),
            "g" => Ok(Column::G),
            "eps" => Ok(Column::Eps),
            "R" | "r" => Ok(Column::R),
            other => Err(Error::Config(format!("unknown function {other:?}; expected m, l, h, g, eps or R"))),
        }
    }
}

/// All functions sampled on one grid. Missing entries are points where the
/// value is undefined or its evaluation failed.
#[derive(Debug, Clone)]
pub struct ReliabilityCurves {
    pub grid: Vec<f64>,
    pub survival: Vec<f64>,
    pub m_values: Vec<Option<f64>>,
    pub l_values: Vec<Option<f64>>,
    /// `None` when the distribution has no density.
    pub h_values: Option<Vec<Option<f64>>>,
    pub g_values: Option<Vec<Option<f64>>>,
    pub eps_values: Vec<Option<f64>>,
    pub r_values: Vec<Option<f64>>,
}

impl ReliabilityCurves {
    pub fn column(&self, c: Column) -> Option<&[Option<f64>]> {
        match c {
            Column::M => Some(&self.m_values),
            Column::L => Some(&self.l_values),
            Column::H => self.h_values.as_deref(),
            Column::G => self.g_values.as_deref(),
            Column::Eps => Some(&self.eps_values),
            Column::R => Some(&self.r_values),
        }
    }

    /// Values of one column with missing entries dropped, paired with prices.
    pub fn points(&self, c: Column) -> Vec<(f64, f64)> {
        match self.column(c) {
            Some(col) => self.grid.iter().zip(col).filter_map(|(&p, v)| v.map(|v| (p, v))).collect(),
            None => Vec::new(),
        }
    }

    /// CSV with header `p,m,l,h,g,eps,R` restricted to `columns` (kept in
    /// that canonical order). Missing values are empty fields.
    pub fn to_csv(&self, columns: &[Column]) -> Result<String> {
        let mut cols: Vec<Column> = columns.to_vec();
        cols.sort();
        cols.dedup();
        let mut data = Vec::with_capacity(cols.len());
        for &c in &cols {
            data.push(self.column(c).ok_or_else(|| Error::MissingDensity(c.header().to_string()))?);
        }
        let mut out = String::from("p");
        for c in &cols {
            out.push(',');
            out.push_str(c.header());
        }
        out.push('\n');
        for (i, p) in self.grid.iter().enumerate() {
            let _ = write!(out, "{p:.16e}");
            for col in &data {
                out.push(',');
                if let Some(v) = col[i] {
                    if v.is_finite() {
                        let _ = write!(out, "{v:.16e}");
                    } else {
                        out.push_str(if v > 0.0 { "inf" } else { "-inf" });
                    }
                }
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Evaluates every available function on the default analysis grid.
pub fn curves(dist: &DemandDistribution, config: &NumericConfig) -> Result<ReliabilityCurves> {
    config.validate()?;
    let g = grid::analysis_grid(dist, config.grid_points)?;
    Ok(curves_on(dist, &g, config))
}

/// Evaluates every available function on an explicit sorted grid.
pub fn curves_on(dist: &DemandDistribution, grid: &[f64], config: &NumericConfig) -> ReliabilityCurves {
    let h_end = dist.upper();
    let excess = excess_on_grid(dist, grid, config);
    let survival: Vec<f64> = grid.iter().map(|&p| dist.survival(p)).collect();
    let mut m_values = Vec::with_capacity(grid.len());
    let mut l_values = Vec::with_capacity(grid.len());
    let mut eps_values = Vec::with_capacity(grid.len());
    let mut r_values = Vec::with_capacity(grid.len());
    for ((&p, &s), t) in grid.iter().zip(&survival).zip(&excess) {
        let inside = p > 0.0 && p < h_end;
        let m = if p >= h_end {
            Some(0.0)
        } else if s < UNDERFLOW {
            None
        } else {
            t.as_ref().ok().map(|t| t / s)
        };
        let l = if inside { m.map(|m| m / p) } else { None };
        m_values.push(m);
        l_values.push(l);
        eps_values.push(l.map(|l| 1.0 / l));
        r_values.push(if p >= h_end { Some(0.0) } else { t.as_ref().ok().map(|t| p * t) });
    }
    let (h_values, g_values) = if dist.has_density() {
        let h: Vec<Option<f64>> = grid.iter().map(|&p| hazard(dist, p).ok()).collect();
        let g = grid.iter().zip(&h).map(|(&p, h)| h.map(|h| p * h)).collect();
        (Some(h), Some(g))
    } else {
        (None, None)
    };
    ReliabilityCurves { grid: grid.to_vec(), survival, m_values, l_values, h_values, g_values, eps_values, r_values }
}
