//! The reference set of distributions used by the cross-checks.

use crate::dist::{convolve, mixture, monotone_transform, DemandDistribution, MonotoneMap};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Member {
    pub name: &'static str,
    pub dist: DemandDistribution,
}

/// Two disjoint uniforms, `U(1,2)` with weight `w` and `U(3,4)` with `1 − w`.
pub fn uniform_pair(w: f64) -> Result<DemandDistribution> {
    let a = DemandDistribution::uniform(1.0, 2.0)?;
    let b = DemandDistribution::uniform(3.0, 4.0)?;
    mixture(&[a, b], &[w, 1.0 - w])
}

/// Twelve members covering every family and combinator. All have a finite
/// variance of `(α − p)₊`, so sample means behave.
pub fn corpus() -> Vec<Member> {
    let build = || -> Result<Vec<Member>> {
        let e1 = DemandDistribution::exponential(1.0)?;
        let e2 = DemandDistribution::exponential(2.0)?;
        Ok(vec![
            Member { name: "uniform-0-1", dist: DemandDistribution::uniform(0.0, 1.0)? },
            Member { name: "exponential-1", dist: e1.clone() },
            Member { name: "pareto-1-3", dist: DemandDistribution::pareto(1.0, 3.0)? },
            Member { name: "lomax-0-1-4", dist: DemandDistribution::lomax(0.0, 1.0, 4.0)? },
            Member { name: "bs-6-5", dist: DemandDistribution::birnbaum_saunders(6.0, 5.0)? },
            Member { name: "loglogistic-4-1", dist: DemandDistribution::loglogistic(4.0, 1.0)? },
            Member { name: "weibull-2-1", dist: DemandDistribution::weibull(2.0, 1.0)? },
            Member { name: "gamma-2-1", dist: DemandDistribution::gamma(2.0, 1.0)? },
            Member { name: "mixture-25", dist: uniform_pair(0.25)? },
            Member { name: "mixture-75", dist: uniform_pair(0.75)? },
            Member { name: "sqrt-exponential-1", dist: monotone_transform(&e1, MonotoneMap::power(0.5))? },
            Member { name: "exp-1-plus-exp-2", dist: convolve(&e1, &e2)? },
        ])
    };
    build().expect("corpus parameters are valid")
}

pub fn member(name: &str) -> Option<DemandDistribution> {
    corpus().into_iter().find(|m| m.name == name).map(|m| m.dist)
}

/// Quantile levels at which prices are probed in the simulation checks.
pub const PRICE_LEVELS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

pub fn probe_prices(dist: &DemandDistribution) -> Result<Vec<f64>> {
    PRICE_LEVELS.iter().map(|&q| dist.quantile(q)).collect()
}

/// Families whose surplus is analytic, for derivative checks.
pub fn closed_form_families() -> Vec<Member> {
    let names = ["uniform-0-1", "exponential-1", "pareto-1-3", "lomax-0-1-4", "loglogistic-4-1", "weibull-2-1"];
    corpus().into_iter().filter(|m| names.contains(&m.name)).collect()
}
