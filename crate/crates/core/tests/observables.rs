use std::f64::consts::PI;

use nvsteady::finite_radius::build_diagnostics;
use nvsteady::observables::{
    compute_pressures, compute_rho, compute_source, identity_deviations, mass_bound, max_abs,
    momentum_balance_residual, particle_density, particle_number, summarize, total_energy, total_mass, tov_residual,
    tov_scale, ObservableProfile, SummaryOptions,
};
use nvsteady::solver::{detect_radius, extend_vacuum, integrate_steady_state};
use nvsteady::special::quadrature::{integrate, QuadratureConfig};
use nvsteady::{Error, PolytropicAnsatz, RadialProfile, SolverNumerics};
use proptest::prelude::*;

fn baseline() -> RadialProfile {
    let e0 = 0.9f64.sqrt();
    let a = PolytropicAnsatz::energy_weighted(0.0, 0.5, e0, 1.0).unwrap();
    integrate_steady_state((0.5 * e0).ln(), &a, &SolverNumerics::default()).unwrap()
}

/// `½ e^{3φ} ∫ Ψ(E)F^k d³p` in spherical momentum coordinates about `x`.
fn cartesian_particle_density(r: f64, phi: f64, a: &PolytropicAnsatz) -> f64 {
    let u = phi.exp();
    let pmax = ((a.e0 / u).powi(2) - 1.0).sqrt();
    let cfg = QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-11, max_panels: 2000 };
    let outer = integrate(
        |p| {
            let e = u * (1.0 + p * p).sqrt();
            let inner = integrate(
                |c| {
                    let f = u * u * r * r * p * p * (1.0 - c * c);
                    a.density(e, f)
                },
                -1.0,
                1.0,
                &cfg,
            )
            .unwrap();
            2.0 * PI * p * p * inner
        },
        0.0,
        pmax,
        &cfg,
    )
    .unwrap();
    0.5 * u.powi(3) * outer
}

#[test]
fn particle_density_matches_cartesian_quadrature() {
    for (a, r, phi) in [
        (PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 1.0).unwrap(), 1.0, -0.4),
        (PolytropicAnsatz::energy_weighted(0.5, 1.0, 1.2, 2.0).unwrap(), 0.7, -0.1),
        (PolytropicAnsatz::plain_power_law(1.0, 1.5, 1.0, 1.0).unwrap(), 2.0, -0.8),
    ] {
        let reduced = particle_density(r, phi, &a).unwrap();
        let oracle = cartesian_particle_density(r, phi, &a);
        assert!(((reduced - oracle) / oracle).abs() < 1e-6, "{reduced} vs {oracle}");
    }
}

#[test]
fn pointwise_observables_vanish_without_matter() {
    let a = PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 0.0).unwrap();
    assert_eq!(compute_rho(1.0, -0.5, &a).unwrap(), 0.0);
    assert_eq!(compute_pressures(1.0, -0.5, &a).unwrap(), (0.0, 0.0));
    assert_eq!(compute_source(1.0, -0.5, &a).unwrap(), 0.0);
    let k0 = PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 1.0).unwrap();
    let (p, pt) = compute_pressures(0.4, -0.5, &k0).unwrap();
    assert!((p - pt).abs() <= 1e-12 * p);
}

#[test]
fn identities_hold_at_every_node() {
    for (k, mu, e0) in [(0.0, 0.5, 0.9f64.sqrt()), (0.5, 1.0, 1.0), (1.0, 0.0, 0.9)] {
        let a = PolytropicAnsatz::energy_weighted(k, mu, e0, 1.0).unwrap();
        let p = integrate_steady_state((0.6 * e0).ln(), &a, &SolverNumerics::default()).unwrap();
        let obs = ObservableProfile::compute(&p).unwrap();
        let (tangential, source) = identity_deviations(&p, &obs);
        assert!(tangential <= 1e-10, "k={k}: {tangential}");
        assert!(source <= 1e-9, "k={k}: {source}");
        assert!(obs.rho.iter().chain(&obs.pressure).chain(&obs.source).all(|&v| v >= 0.0));
    }
}

#[test]
fn mass_energy_and_number_of_the_baseline() {
    let p = baseline();
    let a = &p.ansatz;
    let obs = ObservableProfile::compute(&p).unwrap();
    let r = detect_radius(&p, a, &p.numerics).unwrap();
    let m = total_mass(&p, &obs).unwrap();
    let bound = mass_bound(p.phi0, r, a).unwrap();
    assert!(m.value > 0.0 && m.value <= bound);
    assert!(m.error_estimate < 1e-7 * m.value);

    // refinement oracle
    let fine = integrate_steady_state(
        p.phi0,
        a,
        &SolverNumerics { max_step: Some(0.005), ode_rel_tol: 1e-10, ode_abs_tol: 1e-12, ..Default::default() },
    )
    .unwrap();
    let fine_obs = ObservableProfile::compute(&fine).unwrap();
    let m_fine = total_mass(&fine, &fine_obs).unwrap().value;
    assert!((m.value - m_fine).abs() < 1e-7 * m_fine, "{} vs {m_fine}", m.value);
    assert!((m.value - 7.977_742_52).abs() < 1e-7);

    let e = total_energy(&p, &obs, m.value).unwrap();
    let ext = extend_vacuum(&p, r);
    assert!((e.exterior_tail - ext.charge * ext.charge / r).abs() < 1e-14 * e.exterior_tail);
    assert!(e.total >= m.value && e.interior_field > 0.0);
    assert!((e.total - m.value - e.interior_field - e.exterior_tail).abs() < 1e-12);

    // r²φ′ increases to a finite limit no larger than M
    assert!(ext.charge > 0.0 && ext.charge <= m.value);
    assert!(ext.phi_inf.is_finite() && ext.phi_inf.exp() >= a.e0);

    let n = particle_number(&p, &obs).unwrap();
    assert!(n.value > 0.0 && n.value.is_finite());
}

#[test]
fn cumulative_mass_tracks_the_flux() {
    let p = baseline();
    let obs = ObservableProfile::compute(&p).unwrap();
    for i in 1..p.len() {
        let rel = (obs.mass_cumulative[i] - p.flux[i]).abs() / p.flux[i];
        assert!(rel < 1e-6, "r = {}: {rel}", p.grid[i]);
    }
}

#[test]
fn vacuum_and_empty_runs_have_no_mass() {
    let a = PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 1.0).unwrap();
    let vac = integrate_steady_state(0.1, &a, &SolverNumerics::default()).unwrap();
    let obs = ObservableProfile::compute(&vac).unwrap();
    assert_eq!(total_mass(&vac, &obs).unwrap().value, 0.0);
    let e = total_energy(&vac, &obs, 0.0).unwrap();
    assert_eq!((e.total, e.exterior_tail), (0.0, 0.0));
    assert_eq!(particle_number(&vac, &obs).unwrap().value, 0.0);
    assert!(max_abs(&tov_residual(&vac, &obs)) == 0.0);

    let empty = PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 0.0).unwrap();
    let p = integrate_steady_state(-0.5, &empty, &SolverNumerics::default()).unwrap();
    let obs = ObservableProfile::compute(&p).unwrap();
    assert_eq!(total_mass(&p, &obs).unwrap().value, 0.0);
    assert_eq!(total_energy(&p, &obs, 0.0).unwrap().total, 0.0);
    let s = summarize(&p, &obs, None, SummaryOptions::default()).unwrap();
    assert_eq!(s.radius, None);
    assert_eq!(s.mass, 0.0);
}

#[test]
fn unclosed_support_is_reported() {
    let e0 = 0.9f64.sqrt();
    let a = PolytropicAnsatz::energy_weighted(0.0, 0.5, e0, 1.0).unwrap();
    let n = SolverNumerics { max_radius: 3.0, ..Default::default() };
    let p = integrate_steady_state((0.5 * e0).ln(), &a, &n).unwrap();
    let obs = ObservableProfile::compute(&p).unwrap();
    assert!(matches!(total_mass(&p, &obs), Err(Error::OpenSupport { .. })));
    let s = summarize(&p, &obs, None, SummaryOptions::default()).unwrap();
    assert!(s.open_support && !s.finite_radius_detected && s.mass.is_nan());
}

#[test]
fn momentum_balance_closes_where_the_tov_form_does_not() {
    let p = baseline();
    let obs = ObservableProfile::compute(&p).unwrap();
    let scale = tov_scale(&p, &obs);
    assert!(max_abs(&momentum_balance_residual(&p, &obs)) <= 1e-8 * scale);
    assert!(max_abs(&tov_residual(&p, &obs)) > 0.1 * scale);
}

#[test]
fn solid_angle_flag_scales_the_integrals() {
    let p = baseline();
    let obs = ObservableProfile::compute(&p).unwrap();
    let d = build_diagnostics(&p, &obs);
    let plain = summarize(&p, &obs, Some(&d), SummaryOptions::default()).unwrap();
    let full = summarize(&p, &obs, Some(&d), SummaryOptions { mass_includes_4pi: true }).unwrap();
    for (x, y) in [
        (plain.mass, full.mass),
        (plain.energy_total, full.energy_total),
        (plain.particle_number, full.particle_number),
        (plain.mass_bound.unwrap(), full.mass_bound.unwrap()),
    ] {
        assert!((y - 4.0 * PI * x).abs() < 1e-12 * y);
    }
    assert_eq!(plain.radius, full.radius);
    assert_eq!(plain.charge, full.charge);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pointwise_identities(k in 0.0f64..2.0, mu in -0.5f64..2.0, r in 0.01f64..5.0, frac in 0.05f64..0.999) {
        let a = PolytropicAnsatz::energy_weighted(k, mu, 1.0, 1.0).unwrap();
        let phi = frac.ln();
        let rho = compute_rho(r, phi, &a).unwrap();
        let (p, pt) = compute_pressures(r, phi, &a).unwrap();
        let s = compute_source(r, phi, &a).unwrap();
        prop_assert!(rho >= 0.0 && p >= 0.0 && s >= 0.0);
        prop_assert!((pt - (k + 1.0) * p).abs() <= 1e-10 * pt.max(1e-300));
        prop_assert!((s - (rho - (2.0 * k + 3.0) * p)).abs() <= 1e-9 * rho.max(1e-300));
    }
}
