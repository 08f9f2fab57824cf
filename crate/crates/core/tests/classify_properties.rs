use mrd_core::classify::{self as cls, check_limit_relation, estimate_limit, LimitCheck};
use mrd_core::corpus;
use mrd_core::{classify, DemandDistribution, Limit, MomentValue, NumericConfig};

fn cfg() -> NumericConfig {
    NumericConfig::default()
}

fn close(l: Limit, want: f64, tol: f64) -> bool {
    matches!(l, Limit::Value(v) if (v - want).abs() <= tol)
}

#[test]
fn lattice_is_consistent_on_the_corpus() {
    for m in corpus::corpus() {
        let r = classify(&m.dist, &cfg()).unwrap();
        assert!(r.lattice_violations().is_empty(), "{}: {:?}", m.name, r.lattice_violations());
        assert!(!r.dgmrd.fails() || !r.dmrd.holds(), "{}", m.name);
    }
}

#[test]
fn pareto_limits_satisfy_the_relation() {
    for k in [2.5, 3.0, 5.0] {
        let d = DemandDistribution::pareto(1.0, k).unwrap();
        let r = classify(&d, &cfg()).unwrap();
        assert!(close(r.gmrd_limit_c, 1.0 / (k - 1.0), 1e-6), "k={k}: {:?}", r.gmrd_limit_c);
        assert!(close(r.gfr_limit_kappa, k, 1e-6), "k={k}: {:?}", r.gfr_limit_kappa);
        assert!(matches!(check_limit_relation(&r), LimitCheck::Pass { .. }));
    }
}

#[test]
fn light_tails_have_infinite_kappa() {
    for name in ["exponential-1", "weibull-2-1", "gamma-2-1"] {
        let d = corpus::member(name).unwrap();
        let r = classify(&d, &cfg()).unwrap();
        assert_eq!(r.gfr_limit_kappa, Limit::Infinite, "{name}");
        assert!(close(r.gmrd_limit_c, 0.0, 1e-6), "{name}: {:?}", r.gmrd_limit_c);
        assert!(matches!(check_limit_relation(&r), LimitCheck::Pass { .. }), "{name}");
        assert_eq!(r.second_moment_finite, Some(true));
    }
}

#[test]
fn relation_is_inapplicable_without_a_density() {
    let d = corpus::member("exp-1-plus-exp-2").unwrap();
    let r = classify(&d, &cfg()).unwrap();
    assert_eq!(r.gfr_limit_kappa, Limit::NotConverged);
    assert!(matches!(check_limit_relation(&r), LimitCheck::Inapplicable(_)));
}

#[test]
fn bounded_support_limits() {
    let d = DemandDistribution::uniform(0.0, 1.0).unwrap();
    let r = classify(&d, &cfg()).unwrap();
    assert!(close(r.gmrd_limit_c, 0.0, 1e-6));
    assert_eq!(r.gfr_limit_kappa, Limit::Infinite);
    assert!(r.ifr.holds() && r.dmrd.holds() && r.igfr.holds() && r.dgmrd.holds());
}

#[test]
fn estimate_limit_on_known_functions() {
    let d = DemandDistribution::exponential(1.0).unwrap();
    let c = cfg();
    assert!(close(estimate_limit(|x| Ok(2.0 + (-x * x).exp()), &d, &c), 2.0, 1e-6));
    assert_eq!(estimate_limit(|x| Ok(x.sqrt()), &d, &c), Limit::Infinite);
    assert!(close(estimate_limit(|x| Ok(1.0 / x), &d, &c), 0.0, 1e-12));
    assert_eq!(estimate_limit(|x| Ok(x.sin()), &d, &c), Limit::NotConverged);
}

#[test]
fn moments_follow_the_tail_index() {
    let c = cfg();
    let d = DemandDistribution::pareto(1.0, 3.0).unwrap();
    assert!(matches!(cls::moment(&d, 1.9, &c).unwrap(), MomentValue::Finite(_)));
    assert_eq!(cls::moment(&d, 3.0, &c).unwrap(), MomentValue::Infinite);
    match cls::moment(&d, 2.0, &c).unwrap() {
        MomentValue::Finite(v) => assert!((v - 3.0).abs() <= 1e-6),
        other => panic!("{other:?}"),
    }
    let g = DemandDistribution::gamma(2.0, 1.0).unwrap();
    let second = cls::moment_by_quadrature(&g, 2.0, &c).unwrap();
    assert!((second - 6.0).abs() <= 1e-8);
    let two = DemandDistribution::pareto(1.0, 2.0).unwrap();
    assert_eq!(cls::moment(&two, 2.0, &c).unwrap(), MomentValue::Infinite);
}

#[test]
fn lomax_with_equal_parameters_has_constant_gmrd() {
    let d = DemandDistribution::lomax(1.0, 1.0, 3.0).unwrap();
    let r = classify(&d, &cfg()).unwrap();
    assert!(close(r.gmrd_limit_c, 0.5, 1e-9), "{:?}", r.gmrd_limit_c);
    assert!(r.dgmrd.holds());
    assert!(close(r.gfr_limit_kappa, 3.0, 1e-9));
}

#[test]
fn report_serializes_every_key() {
    let r = classify(&corpus::member("pareto-1-3").unwrap(), &cfg()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["ifr", "dmrd", "igfr", "dgmrd", "c", "kappa", "second_moment_finite", "tolerance"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["dgmrd"]["verdict"], "holds");
}

/// Second divided differences of `ln m` are nonnegative, up to slack.
fn log_convex(points: &[(f64, f64)], slack: f64) -> bool {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(x, m)| (x, m.ln())).collect();
    pts.windows(3).all(|w| {
        let d1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        let d2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
        d2 - d1 >= -slack * d1.abs().max(d2.abs()).max(1e-12)
    })
}

#[test]
fn dgmrd_with_log_convex_mrd_is_igfr() {
    let c = cfg();
    let mut seen = 0;
    for m in corpus::corpus().into_iter().filter(|m| m.dist.has_density()) {
        let r = classify(&m.dist, &c).unwrap();
        let curves = mrd_core::reliability::curves(&m.dist, &c).unwrap();
        let mrd = curves.points(mrd_core::reliability::Column::M);
        if r.dgmrd.holds() && log_convex(&mrd, 1e-6) {
            seen += 1;
            assert!(!r.igfr.fails(), "{}: dgmrd, log-convex m, but igfr fails", m.name);
        }
    }
    assert!(seen >= 2, "only {seen} corpus members exercise the implication");
}
