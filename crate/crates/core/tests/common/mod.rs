#![allow(dead_code)]

use mrd_core::dist::{left_truncate, mixture, monotone_transform, scale, shift, DemandDistribution, MonotoneMap};
use proptest::prelude::*;

pub fn family() -> impl Strategy<Value = DemandDistribution> {
    prop_oneof![
        (0.0..2.0f64, 0.1..3.0f64).prop_map(|(l, w)| DemandDistribution::uniform(l, l + w).unwrap()),
        (0.2..5.0f64).prop_map(|r| DemandDistribution::exponential(r).unwrap()),
        (0.5..3.0f64, 1.2..6.0f64).prop_map(|(l, k)| DemandDistribution::pareto(l, k).unwrap()),
        (0.0..2.0f64, 0.3..3.0f64, 1.5..6.0f64).prop_map(|(a, b, k)| DemandDistribution::lomax(a, b, k).unwrap()),
        (0.2..6.0f64, 0.5..5.0f64).prop_map(|(a, b)| DemandDistribution::birnbaum_saunders(a, b).unwrap()),
        (1.5..6.0f64, 0.5..3.0f64).prop_map(|(k, s)| DemandDistribution::loglogistic(k, s).unwrap()),
        (0.6..4.0f64, 0.5..3.0f64).prop_map(|(c, s)| DemandDistribution::weibull(c, s).unwrap()),
        (0.6..5.0f64, 0.5..3.0f64).prop_map(|(a, s)| DemandDistribution::gamma(a, s).unwrap()),
    ]
}

/// A family, possibly wrapped in one combinator. Mixtures pair the family
/// with an exponential so the support stays connected.
pub fn distribution() -> impl Strategy<Value = DemandDistribution> {
    (family(), 0..6usize, 0.3..4.0f64, 0.05..0.95f64).prop_map(|(d, op, x, w)| match op {
        0 => d,
        1 => scale(&d, x).unwrap(),
        2 => shift(&d, x).unwrap(),
        3 => monotone_transform(&d, MonotoneMap::sqrt()).unwrap(),
        4 => mixture(&[d, DemandDistribution::exponential(x).unwrap()], &[w, 1.0 - w]).unwrap(),
        _ => {
            let at = d.quantile(w * 0.5).unwrap();
            left_truncate(&d, at).unwrap()
        }
    })
}
