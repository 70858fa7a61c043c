use kls_core::exponents::{bourgain_exponents, rational::q};
use kls_core::xsb::{nonlinear_estimate_check, strichartz_check, EnsembleSpec, LinearEstimate};

fn spec(size: usize) -> EnsembleSpec {
    EnsembleSpec { size, num_points: 32, num_times: 64, ..EnsembleSpec::default() }
}

#[test]
fn nonlinear_reports_are_refinement_stable() {
    let exps = bourgain_exponents(q(1, 1), q(1, 5)).unwrap();
    let (a, b) = nonlinear_estimate_check(&exps, &spec(6)).unwrap();
    for rep in [a, b] {
        assert!(rep.worst_ratio.is_finite() && rep.worst_ratio > 0.0);
        let trend = rep.grid_refinement_trend.unwrap();
        assert!((0.5..=2.0).contains(&trend), "{} trend {trend}", rep.estimate_id);
        assert!(rep.ratio_quantiles.iter().all(|(_, v)| *v <= rep.worst_ratio));
    }
}

#[test]
fn worst_ratios_are_stable_under_ensemble_doubling() {
    let estimates = [
        LinearEstimate::SchrodingerStrichartz { q: f64::INFINITY, r: 2.0, b: 0.6 },
        LinearEstimate::SchrodingerStrichartz { q: 4.0, r: f64::INFINITY, b: 0.6 },
        LinearEstimate::KleinGordon { p: 8.0, s: 0.5, b: 0.4 },
    ];
    for est in estimates {
        let small = strichartz_check(est, &spec(6)).unwrap().worst_ratio;
        let large = strichartz_check(est, &spec(12)).unwrap().worst_ratio;
        assert!(large < 2.0 * small && small < 2.0 * large, "{}: {small} -> {large}", est.id());
    }
    let exps = bourgain_exponents(q(1, 1), q(1, 5)).unwrap();
    let (a6, b6) = nonlinear_estimate_check(&exps, &spec(6)).unwrap();
    let (a12, b12) = nonlinear_estimate_check(&exps, &spec(12)).unwrap();
    assert!(a12.worst_ratio < 2.0 * a6.worst_ratio);
    assert!(b12.worst_ratio < 2.0 * b6.worst_ratio);
}
