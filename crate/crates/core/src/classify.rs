//! Numerical membership tests for the IFR, DMRD, IGFR and DGMRD classes,
//! tail limits of `ℓ` and `g`, and moment finiteness.
//!
//! A verdict of "holds" means no violation larger than the slack was found
//! on a finite grid; it is evidence, not proof.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::config::NumericConfig;
use crate::dist::DemandDistribution;
use crate::error::{Error, Result};
use crate::grid::{self, TAIL_FLOOR};
use crate::quad;
use crate::reliability::{self, Column};

pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    NonIncreasing,
    NonDecreasing,
    NonMonotone,
}

/// Outcome of a monotonicity scan, with index pairs `(i, j)`, `i < j`,
/// witnessing a significant rise or fall when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonotoneScan {
    pub kind: Monotonicity,
    pub rise: Option<(usize, usize)>,
    pub fall: Option<(usize, usize)>,
}

/// Scans `values` for a rise or fall exceeding `slack · max|v|`.
pub fn classify_monotone(values: &[f64], slack: f64) -> Result<MonotoneScan> {
    if values.len() < MIN_POINTS {
        return Err(Error::TooFewPoints { need: MIN_POINTS, got: values.len() });
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("monotonicity scan needs finite values, got {bad}")));
    }
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = slack * scale;
    let (mut lo, mut hi) = (0, 0);
    let (mut rise, mut fall) = (None, None);
    for (j, &v) in values.iter().enumerate().skip(1) {
        if rise.is_none() && v - values[lo] > tol {
            rise = Some((lo, j));
        }
        if fall.is_none() && values[hi] - v > tol {
            fall = Some((hi, j));
        }
        if v < values[lo] {
            lo = j;
        }
        if v > values[hi] {
            hi = j;
        }
    }
    let kind = match (rise, fall) {
        (None, None) => Monotonicity::Constant,
        (None, Some(_)) => Monotonicity::NonIncreasing,
        (Some(_), None) => Monotonicity::NonDecreasing,
        (Some(_), Some(_)) => Monotonicity::NonMonotone,
    };
    Ok(MonotoneScan { kind, rise, fall })
}

/// True when every step is a drop larger than `slack` times the local size.
pub fn strictly_decreasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[0] - w[1] > slack * w[0].abs().max(w[1].abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub p1: f64,
    pub p2: f64,
    pub v1: f64,
    pub v2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Holds,
    Fails(Witness),
    Unknown(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn witness(&self) -> Option<Witness> {
        match self {
            Verdict::Fails(w) => Some(*w),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails(_) => "fails-with-witness",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Pair(f64, f64);
        impl Serialize for Pair {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(&self.0)?;
                seq.serialize_element(&self.1)?;
                seq.end()
            }
        }
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("verdict", self.as_str())?;
        map.serialize_entry("witness", &self.witness().map(|w| Pair(w.p1, w.p2)))?;
        map.end()
    }
}

/// A tail limit estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Value(f64),
    Infinite,
    NotConverged,
}

impl Limit {
    pub fn value(self) -> Option<f64> {
        match self {
            Limit::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl Serialize for Limit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Limit::Value(v) => s.serialize_f64(*v),
            Limit::Infinite => s.serialize_str("inf"),
            Limit::NotConverged => s.serialize_str("not-converged"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentValue {
    Finite(f64),
    Infinite,
    /// No finiteness criterion applied and the integral did not settle.
    NumericallyDivergent,
}

impl MomentValue {
    pub fn is_finite(self) -> Option<bool> {
        match self {
            MomentValue::Finite(_) => Some(true),
            MomentValue::Infinite => Some(false),
            MomentValue::NumericallyDivergent => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub ifr: Verdict,
    pub dmrd: Verdict,
    pub igfr: Verdict,
    pub dgmrd: Verdict,
    #[serde(rename = "c")]
    pub gmrd_limit_c: Limit,
    #[serde(rename = "kappa")]
    pub gfr_limit_kappa: Limit,
    pub second_moment_finite: Option<bool>,
    #[serde(rename = "tolerance")]
    pub tolerance_used: f64,
    /// `ℓ` drops strictly between every pair of neighbouring grid points.
    #[serde(skip)]
    pub gmrd_strict: bool,
    /// Diagnostics: reasons for unknown verdicts, lattice or limit-relation
    /// inconsistencies.
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Inclusion violations among the verdicts that are not unknown.
    pub fn lattice_violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let implies = |a: &Verdict, b: &Verdict| !(a.holds() && b.fails());
        if !implies(&self.ifr, &self.igfr) {
            v.push("ifr holds but igfr fails");
        }
        if !implies(&self.ifr, &self.dmrd) {
            v.push("ifr holds but dmrd fails");
        }
        if !implies(&self.igfr, &self.dgmrd) {
            v.push("igfr holds but dgmrd fails");
        }
        if !implies(&self.dmrd, &self.dgmrd) {
            v.push("dmrd holds but dgmrd fails");
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expect {
    NonIncreasing,
    NonDecreasing,
}

fn verdict_for(points: &[(f64, f64)], expect: Expect, slack: f64, what: &str) -> Verdict {
    let values: Vec<f64> = points.iter().map(|p| p.1).collect();
    let scan = match classify_monotone(&values, slack) {
        Ok(s) => s,
        Err(e) => return Verdict::Unknown(format!("{what}: {e}")),
    };
    let bad = match expect {
        Expect::NonIncreasing => scan.rise,
        Expect::NonDecreasing => scan.fall,
    };
    match bad {
        None => Verdict::Holds,
        Some((i, j)) => Verdict::Fails(Witness { p1: points[i].0, p2: points[j].0, v1: points[i].1, v2: points[j].1 }),
    }
}

/// Grid used by [`classify`]: the analysis grid plus doublings of its last
/// point while the tail is numerically alive.
pub fn classification_grid(dist: &DemandDistribution, config: &NumericConfig) -> Result<Vec<f64>> {
    let mut g = grid::analysis_grid(dist, config.grid_points)?;
    let last = *g.last().expect("grid is nonempty");
    g.extend(grid::tail_extension(dist, last, config.tail_probe_max_doublings));
    Ok(g)
}

/// Probes `f` along `p₀·2^j` (or geometrically towards a finite `H`).
///
/// Converged when the last four values agree within `tail_agree_tol`
/// relative. Sequences whose last four successive ratios, normalized to one
/// doubling, all stay below 0.95 (above 1.05) are reported as tending to 0
/// (to infinity). Light tails leave the numerical support after a handful of
/// doublings, so the step is refined until at least eight probes fit.
pub fn estimate_limit<F>(f: F, dist: &DemandDistribution, config: &NumericConfig) -> Limit
where
    F: Fn(f64) -> Result<f64>,
{
    let lo = dist.lower();
    let p0 = match dist.quantile(0.5) {
        Ok(m) => m.max(lo),
        Err(_) => return Limit::NotConverged,
    };
    let mut log2_step = 1.0_f64;
    let mut values = probe(&f, dist, p0, log2_step, config.tail_probe_max_doublings);
    while values.len() < 8 && log2_step > 1.0 / 64.0 {
        log2_step *= 0.5;
        let steps = (config.tail_probe_max_doublings as f64 / log2_step) as usize;
        values = probe(&f, dist, p0, log2_step, steps);
    }
    let n = values.len();
    if n < 4 {
        return Limit::NotConverged;
    }
    let last = &values[n - 4..];
    let top = last.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let spread =
        last.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - last.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if spread <= config.tail_agree_tol * top {
        return Limit::Value(values[n - 1]);
    }
    if n >= 5 && values[n - 5..].iter().all(|&v| v > 0.0) {
        let ratios: Vec<f64> = values[n - 5..].windows(2).map(|w| (w[1] / w[0]).powf(1.0 / log2_step)).collect();
        if ratios.iter().all(|&r| r <= 0.95) {
            return Limit::Value(0.0);
        }
        if ratios.iter().all(|&r| r >= 1.05) {
            return Limit::Infinite;
        }
    }
    Limit::NotConverged
}

/// Values of `f` at `p₀·2^(j·step)`, or approaching a finite `H` with the gap
/// shrinking by that factor, while the tail is numerically alive.
fn probe<F>(f: &F, dist: &DemandDistribution, p0: f64, log2_step: f64, steps: usize) -> Vec<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let hi = dist.upper();
    let mut values = Vec::new();
    for j in 0..=steps {
        let factor = (j as f64 * log2_step).exp2();
        let p = if hi.is_finite() { hi - (hi - p0) / factor } else { p0 * factor };
        if !(p < hi) || dist.survival(p) < TAIL_FLOOR {
            break;
        }
        match f(p) {
            Ok(v) if v.is_finite() => values.push(v),
            _ => break,
        }
    }
    values
}

/// `c = lim ℓ(p)`; zero for bounded support.
pub fn gmrd_limit(dist: &DemandDistribution, config: &NumericConfig) -> Limit {
    if dist.upper().is_finite() {
        return Limit::Value(0.0);
    }
    estimate_limit(|p| reliability::gmrd_with(dist, p, config), dist, config)
}

/// `κ = lim g(p)` as `p` approaches the top of the support.
pub fn gfr_limit(dist: &DemandDistribution, config: &NumericConfig) -> Limit {
    if !dist.has_density() {
        return Limit::NotConverged;
    }
    estimate_limit(|p| reliability::gfr(dist, p), dist, config)
}

/// Finiteness of `E αⁿ` from the DGMRD tail limit: finite iff `n < 1 + 1/c`.
///
/// Orders within `tail_agree_tol` (relative) of the boundary count as the
/// boundary itself, which is infinite.
pub fn moment_finite_by_limit(order: f64, c: f64, config: &NumericConfig) -> bool {
    if c <= 0.0 {
        return true;
    }
    let boundary = 1.0 + 1.0 / c;
    order < boundary * (1.0 - config.tail_agree_tol)
}

/// `E αⁿ = ∫₀^∞ n uⁿ⁻¹ F̄(u) du` by quadrature.
pub fn moment_by_quadrature(dist: &DemandDistribution, order: f64, config: &NumericConfig) -> Result<f64> {
    let (lo, hi) = dist.support();
    let head = lo.powf(order);
    let f = |u: f64| order * u.powf(order - 1.0) * dist.survival(u);
    let tol = config.tolerance();
    let breaks = dist.breakpoints();
    let body = if hi.is_finite() {
        quad::integrate_with_breaks(f, lo, hi, breaks, tol)?
    } else {
        quad::integrate_to_infinity(f, lo, dist.scale_hint(), breaks, tol)?
    };
    Ok(head + body.value)
}

/// `E αⁿ` using a precomputed DGMRD verdict and tail limit when available.
pub fn moment_given(
    dist: &DemandDistribution,
    order: f64,
    dgmrd: &Verdict,
    c: Limit,
    config: &NumericConfig,
) -> Result<MomentValue> {
    if !(order > 0.0 && order.is_finite()) {
        return Err(Error::Domain(format!("moment order must be positive, got {order}")));
    }
    if dist.upper().is_finite() {
        return moment_by_quadrature(dist, order, config).map(MomentValue::Finite);
    }
    if let (true, Limit::Value(c)) = (dgmrd.holds(), c) {
        if !moment_finite_by_limit(order, c, config) {
            return Ok(MomentValue::Infinite);
        }
        return moment_by_quadrature(dist, order, config).map(MomentValue::Finite);
    }
    match moment_by_quadrature(dist, order, config) {
        Ok(v) => Ok(MomentValue::Finite(v)),
        Err(Error::DivergentIntegral { .. }) => Ok(MomentValue::NumericallyDivergent),
        Err(e) => Err(e),
    }
}

/// `E αⁿ`, classifying the distribution first to decide finiteness.
pub fn moment(dist: &DemandDistribution, order: f64, config: &NumericConfig) -> Result<MomentValue> {
    let (dgmrd, c) = if dist.upper().is_finite() {
        (Verdict::Holds, Limit::Value(0.0))
    } else {
        let g = classification_grid(dist, config)?;
        let curves = reliability::curves_on(dist, &g, config);
        let l = verdict_for(&curves.points(Column::L), Expect::NonIncreasing, config.mono_slack, "l");
        (l, gmrd_limit(dist, config))
    };
    moment_given(dist, order, &dgmrd, c, config)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LimitCheck {
    Pass { residual: f64 },
    Fail { residual: f64 },
    Inapplicable(String),
}

/// Checks `c = 1/(κ − 1)`, reading `1/(∞ − 1)` as 0.
pub fn check_limit_relation(report: &ClassificationReport) -> LimitCheck {
    let c = match report.gmrd_limit_c {
        Limit::Value(c) => c,
        other => return LimitCheck::Inapplicable(format!("c is {other:?}")),
    };
    let predicted = match report.gfr_limit_kappa {
        Limit::Value(k) if k > 1.0 => 1.0 / (k - 1.0),
        Limit::Infinite => 0.0,
        Limit::Value(k) => return LimitCheck::Inapplicable(format!("kappa = {k} is not above 1")),
        Limit::NotConverged => return LimitCheck::Inapplicable("kappa did not converge".into()),
    };
    let residual = (c - predicted).abs();
    if residual <= 1e-3 {
        LimitCheck::Pass { residual }
    } else {
        LimitCheck::Fail { residual }
    }
}

pub fn classify(dist: &DemandDistribution, config: &NumericConfig) -> Result<ClassificationReport> {
    config.validate()?;
    let g = classification_grid(dist, config)?;
    let curves = reliability::curves_on(dist, &g, config);
    let slack = config.mono_slack;
    let mut notes = Vec::new();

    let inside: Vec<(f64, f64)> =
        curves.points(Column::M).into_iter().filter(|(p, v)| *p < dist.upper() && v.is_finite()).collect();
    let dmrd = verdict_for(&inside, Expect::NonIncreasing, slack, "m");
    let l_points: Vec<(f64, f64)> = curves.points(Column::L).into_iter().filter(|(_, v)| v.is_finite()).collect();
    let dgmrd = verdict_for(&l_points, Expect::NonIncreasing, slack, "l");
    let l_values: Vec<f64> = l_points.iter().map(|p| p.1).collect();
    let gmrd_strict = dgmrd.holds() && strictly_decreasing(&l_values, slack);

    let (ifr, igfr) = if dist.has_density() {
        let finite =
            |c: Column| -> Vec<(f64, f64)> { curves.points(c).into_iter().filter(|(_, v)| v.is_finite()).collect() };
        (
            verdict_for(&finite(Column::H), Expect::NonDecreasing, slack, "h"),
            verdict_for(&finite(Column::G), Expect::NonDecreasing, slack, "g"),
        )
    } else {
        let why = "no density".to_string();
        (Verdict::Unknown(why.clone()), Verdict::Unknown(why))
    };
    for (name, v) in [("ifr", &ifr), ("dmrd", &dmrd), ("igfr", &igfr), ("dgmrd", &dgmrd)] {
        if let Verdict::Unknown(why) = v {
            notes.push(format!("{name} unknown: {why}"));
        }
    }

    let c = gmrd_limit(dist, config);
    let kappa = gfr_limit(dist, config);
    let second_moment_finite = match moment_given(dist, 2.0, &dgmrd, c, config) {
        Ok(m) => m.is_finite(),
        Err(e) => {
            notes.push(format!("second moment: {e}"));
            None
        }
    };

    let mut report = ClassificationReport {
        ifr,
        dmrd,
        igfr,
        dgmrd,
        gmrd_limit_c: c,
        gfr_limit_kappa: kappa,
        second_moment_finite,
        tolerance_used: slack,
        gmrd_strict,
        notes,
    };
    for v in report.lattice_violations() {
        report.notes.push(format!("lattice violation: {v}"));
    }
    if let LimitCheck::Fail { residual } = check_limit_relation(&report) {
        report.notes.push(format!("limit relation off by {residual:e}"));
    }
    Ok(report)
}
