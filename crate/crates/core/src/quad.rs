//! Adaptive Gauss–Kronrod quadrature on finite intervals and on `[a, ∞)`.
//!
//! Finite intervals use a global adaptive 7/15-point Gauss–Kronrod scheme:
//! the segment with the largest error estimate is bisected until the total
//! error meets the tolerance. Half-infinite intervals are cut into geometric
//! panels `[a + w(2^j - 1), a + w(2^{j+1} - 1)]`; each panel is integrated
//! adaptively and the panel sums are accumulated until the estimated
//! remainder is below tolerance. Heavy polynomial tails give a panel ratio
//! that settles near `2^{1-k}`, which both drives the remainder estimate and
//! detects divergence when the ratio stays at one.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Absolute and relative error targets for one integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-10, 1e-8)
    }
}

/// Result of an integration with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_SEGMENTS: usize = 400;
const MAX_PANELS: usize = 400;

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Estimate> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::QuadratureFailure { a, b, error: f64::INFINITY });
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Estimate { value, error: err })
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Integrates `f` over `[a, b]` with global adaptive bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_ref(&f, a, b, tol)
}

fn integrate_ref<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("finite interval required, got [{a}, {b}]")));
    }
    let first = kronrod15(f, a, b)?;
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, est: first });
    // Segments too narrow to split are parked here with their error.
    let mut frozen_error = 0.0;
    let mut frozen_value = 0.0;
    while total.error > tol.target(total.value) && heap.len() < MAX_SEGMENTS {
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b || (seg.b - seg.a) < 1e-14 * seg.a.abs().max(seg.b.abs()) {
            frozen_error += seg.est.error;
            frozen_value += seg.est.value;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = kronrod15(f, seg.a, mid)?;
        let right = kronrod15(f, mid, seg.b)?;
        total.value += left.value + right.value - seg.est.value;
        total.error += left.error + right.error - seg.est.error;
        heap.push(Segment { a: seg.a, b: mid, est: left });
        heap.push(Segment { a: mid, b: seg.b, est: right });
    }
    // Re-sum to shed the drift from incremental updates.
    let value = heap.iter().map(|s| s.est.value).sum::<f64>() + frozen_value;
    let error = heap.iter().map(|s| s.est.error).sum::<f64>() + frozen_error;
    let accepted = 100.0 * tol.target(value);
    if error > accepted && error > 1e-300 {
        return Err(Error::QuadratureFailure { a, b, error });
    }
    Ok(Estimate { value, error })
}

/// Integrates over `[a, b]`, splitting first at every breakpoint inside.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    integrate_breaks_ref(&f, a, b, breaks, tol)
}

fn integrate_breaks_ref<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Result<Estimate> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = cuts.len() + 1;
    let piece_tol = Tolerance::new(tol.abs / pieces as f64, tol.rel);
    let mut lo = a;
    let mut acc = Estimate { value: 0.0, error: 0.0 };
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        let e = integrate_ref(f, lo, hi, piece_tol)?;
        acc.value += e.value;
        acc.error += e.error;
        lo = hi;
    }
    Ok(acc)
}

/// Integrates `f` over `[a, ∞)`.
///
/// `width` sets the first panel; it should be on the order of the scale on
/// which `f` varies. Fails with [`Error::DivergentIntegral`] when the panel
/// sums do not decay.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    width: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Domain(format!("panel width must be positive, got {width}")));
    }
    let panel_tol = Tolerance::new(tol.abs / 64.0, tol.rel);
    let mut sum = 0.0;
    let mut error = 0.0;
    let mut prev: Option<f64> = None;
    let mut ratios: Vec<f64> = Vec::new();
    let mut lo = a;
    let mut step = width;
    for _ in 0..MAX_PANELS {
        let hi = lo + step;
        if !hi.is_finite() {
            break;
        }
        let e = integrate_breaks_ref(&f, lo, hi, breaks, panel_tol)?;
        sum += e.value;
        error += e.error;
        let c = e.value.abs();
        let target = tol.target(sum);
        if c == 0.0 && f(hi) == 0.0 {
            return Ok(Estimate { value: sum, error });
        }
        if let Some(p) = prev {
            if p > 0.0 {
                let r = c / p;
                ratios.push(r);
                if r < 1.0 {
                    let remainder = c * r / (1.0 - r);
                    if remainder <= 0.1 * target {
                        // A collapsing ratio means faster than geometric decay, where c·r/(1 − r)
                        // is only a bound; keep it as error rather than adding it.
                        let collapsing = ratios.len() >= 2 && r < 0.5 * ratios[ratios.len() - 2];
                        let value = if collapsing { sum } else { sum + remainder };
                        return Ok(Estimate { value, error: error + remainder });
                    }
                    // Geometric extrapolation once the panel ratio has settled.
                    let n = ratios.len();
                    if n >= 8 && r < 0.999 {
                        let spread = ratios[n - 3..].iter().fold(0.0_f64, |m, &x| m.max((x - r).abs()));
                        if spread <= 1e-7 * r {
                            let tail = c * r / (1.0 - r);
                            let tail_err = tail * 1e-5;
                            if tail_err <= target {
                                return Ok(Estimate { value: sum + tail, error: error + tail_err });
                            }
                        }
                    }
                }
                let n = ratios.len();
                if n >= 12 && ratios[n - 12..].iter().all(|&x| x >= 0.999) {
                    return Err(Error::DivergentIntegral { from: a });
                }
            }
        }
        prev = Some(c);
        lo = hi;
        step *= 2.0;
    }
    Err(Error::DivergentIntegral { from: a })
}
