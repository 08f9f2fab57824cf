//! The seller's problem: maximize `R(p) = p·E(α − p)₊`.
//!
//! Interior optima satisfy `p = m(p)`, i.e. unit elasticity. When `ℓ` is
//! decreasing and eventually below 1 the fixed point is unique and is the
//! maximizer; otherwise the solver falls back to comparing candidates.

use serde_json::{json, Value};

use crate::classify;
use crate::config::NumericConfig;
use crate::dist::DemandDistribution;
use crate::error::Result;
use crate::grid::{self, TAIL_FLOOR};
use crate::reliability;
use crate::roots;

/// `ℓ` only has to reach this close to 1 to count as `ℓ ≥ 1`.
const UNIT_TOL: f64 = 1e-9;

/// A closed price interval `[a, b]`; `b` may be infinite.
pub type Interval = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    DgmrdStrict,
    DgmrdWeakSafe,
    NotCertified,
}

impl Certificate {
    pub fn as_str(self) -> &'static str {
        match self {
            Certificate::DgmrdStrict => "dgmrd-strict",
            Certificate::DgmrdWeakSafe => "dgmrd-weak-safe",
            Certificate::NotCertified => "not-certified",
        }
    }

    pub fn is_certified(self) -> bool {
        self != Certificate::NotCertified
    }
}

#[derive(Debug, Clone)]
pub struct PricingSolution {
    pub fixed_points: Vec<f64>,
    /// Intervals on which `m(p) = p`; the right end is infinite when the
    /// ray runs to the numerical horizon of an unbounded support.
    pub rays: Vec<Interval>,
    pub p1: f64,
    pub certificate: Certificate,
    pub certificate_reason: String,
    /// `None` when revenue is still rising at the numerical horizon.
    pub optimal_price: Option<f64>,
    /// Revenue at the optimum, or at the horizon when there is none.
    pub optimal_revenue: f64,
    pub elasticity_at_optimum: f64,
}

fn num_or_inf(x: f64) -> Value {
    if x.is_infinite() {
        json!("inf")
    } else {
        json!(x)
    }
}

impl PricingSolution {
    pub fn has_finite_maximizer(&self) -> bool {
        self.optimal_price.is_some()
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "fixed_points": self.fixed_points,
            "rays": self.rays.iter().map(|&(a, b)| json!([a, num_or_inf(b)])).collect::<Vec<_>>(),
            "p1": num_or_inf(self.p1),
            "certificate": self.certificate.as_str(),
            "certificate_reason": self.certificate_reason,
            "optimal_price": match self.optimal_price {
                Some(p) => json!(p),
                None => json!("none"),
            },
            "optimal_revenue": self.optimal_revenue,
            "elasticity_at_optimum": self.elasticity_at_optimum,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("solution serialization cannot fail")
    }
}

/// The price grid searched by the solver, and whether its last point is the
/// numerical horizon of an unbounded tail rather than the top of the support.
#[derive(Debug, Clone)]
pub struct PricingGrid {
    pub points: Vec<f64>,
    pub open_ended: bool,
}

pub fn pricing_grid(dist: &DemandDistribution, config: &NumericConfig) -> Result<PricingGrid> {
    let mean = dist.mean()?;
    let h = dist.upper();
    let lo = mean * 1e-6;
    let (hi, open_ended) = if h.is_finite() {
        (h * (1.0 - 1e-12), false)
    } else {
        let mut hi = dist.quantile(0.999)?.max(2.0 * mean);
        let mut n = 0;
        loop {
            let s = dist.survival(2.0 * hi);
            if s < TAIL_FLOOR || n >= config.tail_probe_max_doublings {
                break;
            }
            match reliability::gmrd_with(dist, hi, config) {
                Ok(l) if l < 1.0 - UNIT_TOL => break,
                Err(_) => break,
                _ => {}
            }
            hi *= 2.0;
            n += 1;
        }
        (hi, true)
    };
    let n = config.grid_points;
    let mut pts = grid::log_space(lo, hi, n);
    pts.extend(grid::lin_space(lo, hi, n));
    pts.extend(dist.breakpoints().iter().copied().filter(|&b| b > lo && b < hi));
    Ok(PricingGrid { points: grid::normalize(pts), open_ended })
}

fn ray_tol(config: &NumericConfig, p: f64) -> f64 {
    config.root_tol.max(10.0 * config.quad_rel_tol) * p.max(1.0)
}

struct Scan {
    grid: PricingGrid,
    m: Vec<Option<f64>>,
    l: Vec<Option<f64>>,
    r: Vec<Option<f64>>,
}

fn scan(dist: &DemandDistribution, config: &NumericConfig) -> Result<Scan> {
    let grid = pricing_grid(dist, config)?;
    let curves = reliability::curves_on(dist, &grid.points, config);
    Ok(Scan { grid, m: curves.m_values, l: curves.l_values, r: curves.r_values })
}

fn phi(dist: &DemandDistribution, p: f64, config: &NumericConfig) -> f64 {
    reliability::mrd_with(dist, p, config).map(|m| m - p).unwrap_or(f64::NAN)
}

fn fixed_points_and_rays(dist: &DemandDistribution, s: &Scan, config: &NumericConfig) -> (Vec<f64>, Vec<Interval>) {
    let pts = &s.grid.points;
    let n = pts.len();
    let phis: Vec<Option<f64>> = pts.iter().zip(&s.m).map(|(&p, m)| m.map(|m| m - p)).collect();
    let flat: Vec<bool> =
        pts.iter().zip(&phis).map(|(&p, f)| f.is_some_and(|f| f.abs() <= ray_tol(config, p))).collect();

    let mut in_ray = vec![false; n];
    let mut rays = Vec::new();
    let mut i = 0;
    while i < n {
        if !flat[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && flat[i + 1] {
            i += 1;
        }
        let end = i;
        if end > start {
            in_ray[start..=end].iter_mut().for_each(|x| *x = true);
            let near = |p: f64| phi(dist, p, config).abs() <= ray_tol(config, p);
            let a = if start > 0 {
                // Walk the left end down to where φ leaves the band, using the
                // root tolerance when the ray satisfies it.
                let tight = |p: f64| phi(dist, p, config).abs() <= config.root_tol * p.max(1.0);
                if tight(pts[start]) {
                    roots::boundary(|p| !tight(p), pts[start - 1], pts[start])
                } else {
                    roots::boundary(|p| !near(p), pts[start - 1], pts[start])
                }
            } else {
                pts[start]
            };
            let b = if end == n - 1 && s.grid.open_ended {
                f64::INFINITY
            } else if end + 1 < n {
                roots::boundary(near, pts[end], pts[end + 1])
            } else {
                pts[end]
            };
            rays.push((a, b));
        }
        i += 1;
    }

    let mut fixed = Vec::new();
    for k in 0..n.saturating_sub(1) {
        if in_ray[k] || in_ray[k + 1] {
            continue;
        }
        let (Some(fa), Some(fb)) = (phis[k], phis[k + 1]) else { continue };
        if fa == 0.0 {
            fixed.push(pts[k]);
            continue;
        }
        if fa.signum() != fb.signum() && fb != 0.0 {
            let tol = config.root_tol;
            let root = roots::bisect(|p| phi(dist, p, config), pts[k], pts[k + 1], |p| tol * p.max(1.0));
            fixed.push(root);
        }
    }
    if let (Some(&last), Some(Some(f))) = (pts.last(), phis.last()) {
        if *f == 0.0 && !in_ray[n - 1] {
            fixed.push(last);
        }
    }
    (fixed, rays)
}

/// Fixed points of `m` and fixed-point rays.
pub fn find_fixed_points(dist: &DemandDistribution, config: &NumericConfig) -> Result<(Vec<f64>, Vec<Interval>)> {
    config.validate()?;
    let s = scan(dist, config)?;
    Ok(fixed_points_and_rays(dist, &s, config))
}

fn p1_from_scan(dist: &DemandDistribution, s: &Scan, config: &NumericConfig) -> f64 {
    let pts = &s.grid.points;
    let last = s.l.iter().rposition(|l| l.is_some_and(|l| l >= 1.0 - UNIT_TOL));
    match last {
        None => 0.0,
        Some(i) if i + 1 == pts.len() => {
            if s.grid.open_ended {
                f64::INFINITY
            } else {
                pts[i]
            }
        }
        Some(i) => roots::boundary(
            |p| reliability::gmrd_with(dist, p, config).is_ok_and(|l| l >= 1.0 - UNIT_TOL),
            pts[i],
            pts[i + 1],
        ),
    }
}

/// `p₁ = sup{p : ℓ(p) ≥ 1}`, infinite when `ℓ ≥ 1` up to the numerical horizon.
pub fn compute_p1(dist: &DemandDistribution, config: &NumericConfig) -> Result<f64> {
    config.validate()?;
    let s = scan(dist, config)?;
    Ok(p1_from_scan(dist, &s, config))
}

fn revenue(dist: &DemandDistribution, p: f64, config: &NumericConfig) -> f64 {
    reliability::expected_revenue_with(dist, p, config).unwrap_or(f64::NEG_INFINITY)
}

fn elasticity_at(dist: &DemandDistribution, p: f64, config: &NumericConfig) -> f64 {
    reliability::elasticity_with(dist, p, config).unwrap_or(f64::NAN)
}

pub fn solve(dist: &DemandDistribution, config: &NumericConfig) -> Result<PricingSolution> {
    config.validate()?;
    let s = scan(dist, config)?;
    let (fixed_points, rays) = fixed_points_and_rays(dist, &s, config);
    let p1 = p1_from_scan(dist, &s, config);
    let report = classify::classify(dist, config)?;

    let mut reasons = Vec::new();
    if dist.cdf(0.0) > 0.0 {
        reasons.push("F(0) > 0, outside the standing hypothesis".to_string());
    }
    let certificate = if !report.dgmrd.holds() {
        reasons.push(format!("dgmrd {}", report.dgmrd.as_str()));
        Certificate::NotCertified
    } else if !p1.is_finite() {
        reasons.push("p1 is infinite".into());
        Certificate::NotCertified
    } else if !rays.is_empty() {
        reasons.push("fixed-point ray detected".into());
        Certificate::NotCertified
    } else if fixed_points.len() != 1 {
        reasons.push(format!("{} fixed points found", fixed_points.len()));
        Certificate::NotCertified
    } else if report.gmrd_strict {
        reasons.push("l strictly decreasing on the grid and p1 finite".into());
        Certificate::DgmrdStrict
    } else {
        reasons.push("l nonincreasing with flat stretches, p1 finite, no fixed-point ray".into());
        Certificate::DgmrdWeakSafe
    };

    if certificate.is_certified() {
        let p = fixed_points[0];
        return Ok(PricingSolution {
            optimal_revenue: revenue(dist, p, config),
            elasticity_at_optimum: elasticity_at(dist, p, config),
            optimal_price: Some(p),
            fixed_points,
            rays,
            p1,
            certificate,
            certificate_reason: reasons.join("; "),
        });
    }

    let pts = &s.grid.points;
    let mut candidates: Vec<f64> = fixed_points.clone();
    for &(a, b) in &rays {
        candidates.push(a);
        if b.is_finite() {
            candidates.push(b);
        }
    }
    let best_grid = s.r.iter().enumerate().filter_map(|(i, r)| r.map(|r| (i, r))).fold(
        None,
        |acc: Option<(usize, f64)>, (i, r)| match acc {
            Some((_, br)) if br >= r => acc,
            _ => Some((i, r)),
        },
    );
    if let Some((i, _)) = best_grid {
        let a = pts[i.saturating_sub(1)];
        let b = pts[(i + 1).min(pts.len() - 1)];
        let (x, rx) = roots::golden_max(|p| revenue(dist, p, config), a, b, 1e-12);
        candidates.push(if rx >= revenue(dist, pts[i], config) { x } else { pts[i] });
    }
    candidates.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64)> = None;
    for &p in &candidates {
        let r = revenue(dist, p, config);
        match best {
            Some((_, br)) if r <= br * (1.0 + 1e-12) => {}
            _ => best = Some((p, r)),
        }
    }

    let horizon = *pts.last().expect("grid is nonempty");
    let r_top = revenue(dist, horizon, config);
    let rising = s.grid.open_ended
        && r_top > revenue(dist, 0.5 * horizon, config) * (1.0 + 1e-9)
        && best.is_none_or(|(_, br)| r_top >= br);
    if rising {
        reasons.push("revenue still rising at the numerical horizon".into());
        return Ok(PricingSolution {
            fixed_points,
            rays,
            p1,
            certificate,
            certificate_reason: reasons.join("; "),
            optimal_price: None,
            optimal_revenue: r_top,
            elasticity_at_optimum: elasticity_at(dist, horizon, config),
        });
    }
    let (p, r) = best.unwrap_or((horizon, r_top));
    reasons.push("optimum chosen by direct revenue comparison".into());
    Ok(PricingSolution {
        fixed_points,
        rays,
        p1,
        certificate,
        certificate_reason: reasons.join("; "),
        optimal_price: Some(p),
        optimal_revenue: r,
        elasticity_at_optimum: elasticity_at(dist, p, config),
    })
}
