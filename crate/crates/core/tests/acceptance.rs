//! Acceptance suite. Every test prints one `[PASS]`/`[FAIL]` line with the
//! measured quantities before asserting. Run with `--nocapture` to see them.

use std::time::Instant;

use num_complex::Complex64;

use kls_core::diagnostics::growth_bound_check;
use kls_core::evolve::{integrate, Coupling};
use kls_core::exponents::{
    admissible_region, bourgain_exponents, epsilon_lattice, rational::q, ExponentSet, Q,
};
use kls_core::fieldcore::{Grid, SimState, SpectralField};
use kls_core::harness::{
    initial_state, run_global, run_picard_experiment, PicardSettings, RunConfig, RunStatus,
};
use kls_core::xsb::{bump_window, xsb_norm, DispersionSymbol, SpaceTimeField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, pass: bool, detail: String) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn config(pairs: &[(&str, &str)]) -> RunConfig {
    let pairs: Vec<(String, String)> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    RunConfig::layered(None, &pairs).expect("valid acceptance config")
}

// Gaussian data on the reference box: m = 1, N = 256, L = 50.
const CONSERVATION_SETUP: &[(&str, &str)] = &[
    ("m", "1"),
    ("grid_points", "256"),
    ("domain_length", "50"),
    ("T", "10"),
    ("ic", "gaussian"),
    ("ic.amplitude", "0.8"),
    ("ic.width", "2"),
    ("ic.velocity", "0.5"),
    ("ic.n_amplitude", "0.6"),
    ("ic.n_width", "3"),
    ("ic.nt_amplitude", "0.2"),
    ("rows_per_window", "20"),
];

fn conservation_config(dt: &str) -> RunConfig {
    let mut pairs = CONSERVATION_SETUP.to_vec();
    pairs.push(("dt", dt));
    config(&pairs)
}

#[test]
fn exact_exponent_identities() {
    let start = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in [q(1, 1), q(5, 4), q(3, 2), q(7, 4)] {
        let lattice = epsilon_lattice(m, 5);
        assert_eq!(lattice.len(), 5);
        for eps in lattice {
            let e = bourgain_exponents(m, eps).expect("lattice epsilon is admissible");
            let gaps_ok = e.gap() == q(1, 2) && e.gap_values().iter().all(|g| *g == q(1, 2));
            let lhs = Q::from_integer(2) * m + e.b1p + e.b2p;
            let rhs = (Q::from_integer(4) * m - Q::from_integer(1)) * e.b1 + e.b2;
            if !(gaps_ok && lhs == rhs && e.balance_holds()) {
                failures.push((m, eps));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && checked == 20 && elapsed < 1.0;
    report("exact exponent identities", pass, format!("{checked} sets, failures {failures:?}, {elapsed:.3}s"));
    assert!(pass);
}

#[test]
fn region_feasibility() {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut pass = true;
    for m in [q(1, 1), q(3, 2), q(19, 10)] {
        let r = admissible_region(m);
        let ok = r.feasible
            && r.witness.is_some_and(|(theta, eps)| {
                r.contains(theta, eps) && ExponentSet::new(m, eps, theta).is_ok()
            });
        detail.push(format!("m={m} witness={:?} ok={ok}", r.witness.map(|(a, b)| (a.to_string(), b.to_string()))));
        pass &= ok;
    }
    let end = admissible_region(q(2, 1));
    pass &= !end.feasible && end.witness.is_none();
    detail.push(format!("m=2 feasible={}", end.feasible));
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 1.0;
    report("region feasibility", pass, format!("{}; {elapsed:.3}s", detail.join("; ")));
    assert!(pass);
}

#[test]
fn conservation_and_growth_envelope() {
    let start = Instant::now();
    let coarse = run_global(&conservation_config("1e-3")).unwrap();
    let fine = run_global(&conservation_config("5e-4")).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(coarse.status, RunStatus::Completed);
    assert_eq!(fine.status, RunStatus::Completed);

    let mass_drift = coarse.relative_mass_drift();
    let e_coarse = coarse.relative_energy_drift();
    let e_fine = fine.relative_energy_drift();
    let ratio = e_coarse / e_fine;
    let pass = mass_drift <= 1e-10 && e_coarse <= 1e-4 && (3.0..=5.0).contains(&ratio) && elapsed <= 240.0;
    report(
        "conservation",
        pass,
        format!(
            "mass drift {mass_drift:e}, energy drift {e_coarse:e} (dt=1e-3) / {e_fine:e} (dt=5e-4), ratio {ratio:.3}, windows {}, {elapsed:.1}s",
            coarse.schedule_log.len()
        ),
    );

    // Envelope consistency on the dt = 1e-3 history.
    let m = 1.0;
    let mass0 = coarse.rows[0].mass;
    let fitted = coarse.growth.fitted;
    let envelope_ok = fitted.is_some_and(|(c_front, c_rate)| {
        let bound = kls_core::diagnostics::GrowthBound { c_front, c_rate, ..coarse.bound };
        c_front <= 4.0 && growth_bound_check(&coarse.rows, &bound, mass0, m).unwrap().holds()
    });
    report("growth envelope", envelope_ok, format!("fitted (c_front, c_rate) = {fitted:?}, baseline {:e}", coarse.bound.baseline));
    assert!(pass);
    assert!(envelope_ok);
}

fn state_distance(a: &SimState, b: &SimState) -> f64 {
    a.u.sub(&b.u).unwrap().l2_norm() + a.n_plus.sub(&b.n_plus).unwrap().l2_norm() + a.n_minus.sub(&b.n_minus).unwrap().l2_norm()
}

#[test]
fn integrator_order() {
    let start = Instant::now();
    let cfg = conservation_config("1e-3");
    let s0 = initial_state(&cfg).unwrap();
    let coupling = Coupling::new(1.0);
    let t = 10.0;
    let runs: Vec<SimState> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| integrate(&s0, dt, (t / dt as f64).round() as usize, &coupling).unwrap())
        .collect();
    let ratio = state_distance(&runs[0], &runs[1]) / state_distance(&runs[1], &runs[2]);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = (3.5..=4.5).contains(&ratio) && elapsed <= 240.0;
    report("integrator order", pass, format!("self-convergence ratio {ratio:.4}, {elapsed:.1}s"));
    assert!(pass);
}

fn direct_l2_hs(f: &SpaceTimeField, s: f64) -> f64 {
    let sum: f64 = (0..f.num_times())
        .map(|j| f.slice(j).weighted_norm(|k| (1.0 + k * k).powf(s)).powi(2))
        .sum();
    (sum * f.dt()).sqrt()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

#[test]
fn xsb_oracle_and_homogeneous_slope() {
    let start = Instant::now();
    let grid = Grid::new(32, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20080)
    ;
    let symbols = [DispersionSymbol::Schrodinger, DispersionSymbol::Plus, DispersionSymbol::Minus];
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let nt = 16 + 2 * rng.random_range(0..16usize);
        let values: Vec<Complex64> =
            (0..nt * 32).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let f = SpaceTimeField::new(&grid, (-1.0, 2.0), nt, values).unwrap();
        let s = rng.random_range(-1.0..1.5);
        let x = xsb_norm(&f, s, 0.0, symbols[trial % 3]).unwrap();
        let d = direct_l2_hs(&f, s);
        worst = worst.max((x - d).abs() / d);
    }
    let oracle_ok = worst <= 1e-12;

    // Windowed free waves ψ_δ(t) e^{i k₀ x} e^{i φ(k₀) t} on a fixed span.
    let k_mode = 3;
    let k0 = 2.0 * std::f64::consts::PI * k_mode as f64 / grid.domain_length();
    let deltas = [1.0, 0.5, 0.25, 0.125];
    let span = (-2.5, 2.5);
    let nt = 1024;
    let mut fits = Vec::new();
    for b in [0.0, 0.25, 0.45] {
        for sym in symbols {
            let phi = sym.phi(k0);
            let s = 0.5;
            let data = SpectralField::plane_wave(&grid, k_mode, Complex64::new(1.0, 0.0));
            let hs = data.weighted_norm(|k| (1.0 + k * k).powf(s));
            let ratios: Vec<f64> = deltas
                .iter()
                .map(|&delta| {
                    let f = SpaceTimeField::from_fn(&grid, span, nt, |x, t| {
                        let w = bump_window(delta, &[t])[0];
                        Complex64::from_polar(w, k0 * x + phi * t)
                    })
                    .unwrap();
                    xsb_norm(&f, s, b, sym).unwrap() / hs
                })
                .collect();
            let xs: Vec<f64> = deltas.iter().map(|d: &f64| d.ln()).collect();
            let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
            fits.push((b, sym.tag(), slope(&xs, &ys)));
        }
    }
    let slope_ok = fits.iter().all(|(b, _, fit)| (fit - (0.5 - b)).abs() <= 0.1);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = oracle_ok && slope_ok && elapsed <= 60.0;
    let fit_text: Vec<String> = fits.iter().map(|(b, t, f)| format!("b={b} {t}: {f:.4}")).collect();
    report(
        "xsb oracle",
        pass,
        format!("b=0 worst relative gap {worst:e}; slopes [{}]; {elapsed:.1}s", fit_text.join(", ")),
    );
    assert!(pass);
}

fn first_advance(m: &str, amplitude: f64) -> (f64, f64, f64) {
    let amp = amplitude.to_string();
    let cfg = config(&[
        ("m", m),
        ("grid_points", "256"),
        ("domain_length", "50"),
        ("dt", "1e-3"),
        ("T", "1e-6"),
        ("ic", "gaussian"),
        ("ic.amplitude", &amp),
        ("ic.width", "2"),
        ("ic.velocity", "0"),
        ("ic.n_amplitude", "6"),
        ("ic.n_width", "3"),
    ]);
    let h = run_global(&cfg).unwrap();
    let e = h.schedule_log[0];
    let advance = e.forecast.advance().expect("doubling forecast applies");
    (advance, e.mass, e.n_pm_half)
}

#[test]
fn scheduler_scaling_law() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for (m_text, m) in [("1", 1.0), ("3/2", 1.5)] {
        let base_amp = 0.16;
        let (a0, mass0, n0) = first_advance(m_text, base_amp);
        for lambda in [2.0f64, 4.0] {
            let (a, mass, n) = first_advance(m_text, lambda * base_amp);
            let regime = n >= 4.0 * mass.powf(2.0 * m) && n0 >= 4.0 * mass0.powf(2.0 * m);
            let measured = a / a0;
            let expected = lambda.powf(-(4.0 * m - 2.0));
            let rel = (measured / expected - 1.0).abs();
            pass &= regime && rel <= 0.05;
            detail.push(format!("m={m_text} λ={lambda}: ratio {measured:.5e} vs {expected:.5e} (rel {rel:.2e}, regime {regime})"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed <= 60.0;
    report("scheduler scaling law", pass, format!("{}; {elapsed:.1}s", detail.join("; ")));
    assert!(pass);
}

#[test]
fn picard_contraction() {
    let start = Instant::now();
    let cfg = config(&[
        ("m", "1"),
        ("grid_points", "128"),
        ("domain_length", "40"),
        ("dt", "1e-3"),
        ("ic", "gaussian"),
        ("ic.amplitude", "0.3"),
        ("ic.width", "2"),
        ("ic.velocity", "0.5"),
        ("ic.n_amplitude", "0.3"),
        ("ic.n_width", "3"),
        ("c_local", "2"),
    ]);
    let settings = PicardSettings { quad_points: 65, ..PicardSettings::default() };
    let report_ = run_picard_experiment(&cfg, &settings).unwrap();
    let compliant: Vec<_> = report_.rows.iter().filter(|r| r.factor <= 1.0).collect();
    // Strang error constant for the endpoint comparison (relative error per dt²).
    let c_split = 1.0;
    let mut pass = true;
    for r in &compliant {
        let tol = (10.0 * settings.fp_tolerance).max(c_split * r.splitting_dt.powi(2));
        pass &= r.compliant && r.converged && r.max_ratio <= 0.5 && r.endpoint_error.is_some_and(|e| e <= tol);
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed <= 300.0;
    let rows: Vec<String> = report_
        .rows
        .iter()
        .map(|r| format!("x{}: ratio {:.3e} err {:?} conv {}", r.factor, r.max_ratio, r.endpoint_error, r.converged))
        .collect();
    report(
        "picard contraction",
        pass,
        format!("base delta {:e}; {}; sorted {} ; {elapsed:.1}s", report_.base_delta, rows.join(", "), report_.ratios_sorted()),
    );
    assert!(pass);
}
