//! Distributions exercised by the benchmarks, one per evaluation path.

use mrd_core::dist::{convolve, mixture, monotone_transform, DemandDistribution, MonotoneMap};

/// Closed-form tail, quadrature-only tail, analytic mixture, transformed
/// tail and a semi-analytic convolution.
pub fn fixtures() -> Vec<(&'static str, DemandDistribution)> {
    let u1 = DemandDistribution::uniform(1.0, 2.0).unwrap();
    let u2 = DemandDistribution::uniform(3.0, 4.0).unwrap();
    let ll = DemandDistribution::loglogistic(2.0, 1.0).unwrap();
    let e = DemandDistribution::exponential(1.0).unwrap();
    vec![
        ("pareto-1-3", DemandDistribution::pareto(1.0, 3.0).unwrap()),
        ("bs-6-5", DemandDistribution::birnbaum_saunders(6.0, 5.0).unwrap()),
        ("mixture-25", mixture(&[u1, u2], &[0.25, 0.75]).unwrap()),
        ("sqrt-exp", monotone_transform(&e, MonotoneMap::sqrt()).unwrap()),
        ("conv-loglog", convolve(&ll, &ll).unwrap()),
    ]
}
