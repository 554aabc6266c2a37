use nvsteady::finite_radius::{
    alpha_limit, beta_dyn_limit, beta_limit, build_diagnostics, check_window, xy_residuals, FiniteRadiusDiagnostics,
    XyResiduals,
};
use nvsteady::observables::ObservableProfile;
use nvsteady::solver::{detect_radius, integrate_steady_state};
use nvsteady::{PolytropicAnsatz, RadialProfile, SolverNumerics};
use proptest::prelude::*;

struct Run {
    profile: RadialProfile,
    diag: FiniteRadiusDiagnostics,
    radius: f64,
    obs: ObservableProfile,
}

fn run(k: f64, mu: f64, e0: f64, numerics: SolverNumerics) -> Run {
    let a = PolytropicAnsatz::energy_weighted(k, mu, e0, 1.0).unwrap();
    let profile = integrate_steady_state((0.5 * e0).ln(), &a, &numerics).unwrap();
    let radius = detect_radius(&profile, &a, &numerics).expect("finite radius");
    let obs = ObservableProfile::compute(&profile).unwrap();
    let diag = build_diagnostics(&profile, &obs);
    Run { profile, diag, radius, obs }
}

fn baseline(numerics: SolverNumerics) -> Run {
    run(0.0, 0.5, 0.9f64.sqrt(), numerics)
}

/// Two values of E₀ per (μ, k), at 30% and 70% across the admissible window for E₀².
fn sweep() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for mu in [0.0, 0.5, 1.0] {
        for k in [0.0, 0.5] {
            let w = check_window(mu, k, 1.0);
            for t in [0.3, 0.7] {
                out.push((mu, k, (w.lower + t * (w.upper - w.lower)).sqrt()));
            }
        }
    }
    out
}

#[test]
fn window_sweep_closes_with_expected_limits() {
    let triples = sweep();
    assert!(triples.len() >= 12);
    for (mu, k, e0) in triples {
        assert!(check_window(mu, k, e0).ok);
        let r = run(k, mu, e0, SolverNumerics::default());
        let d = &r.diag;
        let last = d.len() - 1;
        let (a0, b0) = (alpha_limit(mu, k), beta_limit(mu, k, e0));
        let tag = format!("mu={mu} k={k} E0^2={}", e0 * e0);
        assert!(r.radius > 0.0 && r.radius < r.profile.numerics.max_radius, "{tag}");
        assert!(((d.alpha[last] - a0) / a0).abs() < 1e-3, "{tag}: alpha {} vs {a0}", d.alpha[last]);
        assert!(((d.beta[last] - b0) / b0).abs() < 1e-3, "{tag}: beta {} vs {b0}", d.beta[last]);
        assert!(d.beta[last] > 0.0 && d.beta[last] < 2.0 * k + 2.0, "{tag}");
        let bd = beta_dyn_limit(mu, k);
        assert!(((d.beta_dyn[last] - bd) / bd).abs() < 1e-3, "{tag}: beta_dyn {} vs {bd}", d.beta_dyn[last]);
        assert!(d.alpha_inf() > 0.0, "{tag}");
        for i in d.last_decade() {
            assert!(d.beta_middle[i].abs() < 1e-3 * d.beta[i].abs(), "{tag}: middle term at r = {}", d.r[i]);
            assert!(((d.alpha[i] - a0) / a0).abs() < 1e-3, "{tag}");
        }
    }
}

#[test]
fn diagnostics_signs_and_centre() {
    let r = baseline(SolverNumerics::default());
    let d = &r.diag;
    assert!(!d.is_empty() && d.excluded == 0);
    assert!(d.eta.iter().all(|&e| e > 0.0));
    assert!(d.x.iter().all(|&x| x >= 0.0) && d.y.iter().all(|&y| y >= 0.0));
    assert!(d.eta.windows(2).all(|w| w[1] <= w[0]));
    assert!(*d.eta.last().unwrap() < 1e-7);
    // x ~ r^{2k+2} near the centre
    assert!(d.x[0] < 1e-6 && d.x[0] < d.x[10]);
    let ratio = d.x[1] / d.x[0];
    let expect = (d.r[1] / d.r[0]).powi(2);
    assert!((ratio / expect - 1.0).abs() < 1e-2);
}

#[test]
fn kernel_ratio_tends_to_one_at_the_edge() {
    let r = baseline(SolverNumerics::default());
    let last = r.diag.node_index[r.diag.len() - 1];
    let nk = &r.obs.kernels[last];
    let ratio = nk.g / (nk.u * nk.u * nk.h);
    assert!((ratio - 1.0).abs() < 1e-6, "{ratio}");
    let first = &r.obs.kernels[1];
    assert!(first.g / (first.u * first.u * first.h) > 1.1);
}

fn residuals(numerics: SolverNumerics) -> (Run, XyResiduals) {
    let r = baseline(numerics);
    let res = xy_residuals(&r.diag, &r.profile, r.radius);
    (r, res)
}

#[test]
fn xy_system_is_satisfied_on_the_baseline() {
    let (_, res) = residuals(SolverNumerics::default());
    assert!(res.r.len() > 200);
    assert!(res.max_local_x() <= 1e-4, "x: {}", res.max_local_x());
    assert!(res.max_local_y_dyn() <= 1e-4, "y: {}", res.max_local_y_dyn());
    assert!(res.max_local_eta() <= 1e-4, "eta: {}", res.max_local_eta());
    assert!(res.max_global_x() <= 1e-4 && res.max_global_y_dyn() <= 1e-4);
}

#[test]
fn closed_form_beta_leaves_an_order_one_y_defect() {
    let (_, res) = residuals(SolverNumerics::default());
    assert!(res.max_local_y() > 0.1);
}

#[test]
fn xy_residuals_shrink_under_refinement() {
    let (coarse_run, coarse) = residuals(SolverNumerics::default());
    let window = (coarse_run.profile.seed_interval, *coarse.r.last().unwrap());
    let coarse = coarse.within(window.0, window.1);
    let (_, fine) = residuals(SolverNumerics { max_step: Some(0.00625), ..Default::default() });
    let fine = fine.within(window.0, window.1);
    assert!(fine.max_local_x() < 0.25 * coarse.max_local_x());
    assert!(fine.max_local_y_dyn() < 0.25 * coarse.max_local_y_dyn());
    assert!(fine.max_local_eta() < 0.25 * coarse.max_local_eta());
}

#[test]
fn vacuum_has_no_diagnostics() {
    let a = PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 1.0).unwrap();
    let p = integrate_steady_state(0.2, &a, &SolverNumerics::default()).unwrap();
    let obs = ObservableProfile::compute(&p).unwrap();
    let d = build_diagnostics(&p, &obs);
    assert!(d.is_empty());
    let res = xy_residuals(&d, &p, 0.0);
    assert!(res.r.is_empty() && res.max_local_x() == 0.0);
}

proptest! {
    #[test]
    fn beta_limit_in_range_exactly_inside_window(mu in -0.9f64..3.0, k in -0.45f64..3.0, e0 in 0.05f64..2.0) {
        let w = check_window(mu, k, e0);
        let b = beta_limit(mu, k, e0);
        prop_assume!(w.margin_lower.abs() > 1e-9 && w.margin_upper.abs() > 1e-9);
        prop_assert_eq!(w.ok, b > 0.0 && b < 2.0 * k + 2.0);
        prop_assert!(alpha_limit(mu, k) > 0.0);
    }
}
