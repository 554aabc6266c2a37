use nvsteady::special::quadrature::{integrate, QuadratureConfig};
use nvsteady::special::{beta_coeff, closed_form_h, eval_g, eval_h, eval_h_derivative, Kernels};
use nvsteady::PolytropicAnsatz;
use proptest::prelude::*;

/// 20 (m, u) points with m in (0, 4] and u in (0, E0).
fn sample(e0: f64) -> Vec<(f64, f64)> {
    (0..20)
        .map(|i| {
            let m = 0.2 * (i as f64 + 1.0);
            let u = e0 * (0.03 + 0.94 * ((i * 7 % 20) as f64) / 19.0);
            (m, u)
        })
        .collect()
}

#[test]
fn energy_weighted_matches_closed_form() {
    for &(mu, e0) in &[(0.0, 1.0), (0.5, 1.0), (1.0, 2.0), (-0.5, 1.0), (2.5, 0.7)] {
        let a = PolytropicAnsatz::energy_weighted(0.0, mu, e0, 1.0).unwrap();
        for (m, u) in sample(e0) {
            let q = eval_h(m, u, &a).unwrap();
            let c = closed_form_h(m, u, mu, e0).unwrap();
            assert!((q - c).abs() <= 1e-8 * c, "mu={mu} e0={e0} m={m} u={u}: {q} vs {c}");
        }
    }
}

#[test]
fn g_decomposes_into_h() {
    for a in [
        PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 1.0).unwrap(),
        PolytropicAnsatz::plain_power_law(0.0, -0.5, 1.2, 1.0).unwrap(),
        PolytropicAnsatz::plain_power_law(0.0, 1.0, 2.0, 3.0).unwrap(),
    ] {
        for (m, u) in sample(a.e0) {
            let g = eval_g(m, u, &a).unwrap();
            let split = eval_h(m + 1.0, u, &a).unwrap() + u * u * eval_h(m, u, &a).unwrap();
            assert!((g - split).abs() <= 1e-10, "m={m} u={u}: {g} vs {split}");
        }
    }
}

#[test]
fn derivative_matches_central_difference() {
    let step = 1e-5;
    for a in [
        PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 1.0).unwrap(),
        PolytropicAnsatz::plain_power_law(0.0, 1.5, 1.3, 1.0).unwrap(),
    ] {
        let tight = QuadratureConfig { abs_tol: 1e-13, rel_tol: 1e-13, max_panels: 400 };
        let k = Kernels::with_quadrature(&a, tight);
        for &(m, u) in &[(0.5, 0.4), (1.5, 0.7), (2.0, 0.9)] {
            let fd = (k.h(m, u + step).unwrap() - k.h(m, u - step).unwrap()) / (2.0 * step);
            let an = eval_h_derivative(m, u, &a).unwrap();
            assert!(((fd - an) / an).abs() < 1e-6, "m={m} u={u}: {fd} vs {an}");
        }
    }
}

#[test]
fn kernels_are_continuous_across_cutoff() {
    let a = PolytropicAnsatz::plain_power_law(0.0, 0.5, 1.0, 1.0).unwrap();
    for &m in &[0.5, 1.5] {
        let below = eval_h(m, 1.0 - 1e-7, &a).unwrap();
        let above = eval_h(m, 1.0 + 1e-7, &a).unwrap();
        assert!(below.abs() < 1e-12 && above == 0.0);
        // C¹ for m > 0: one-sided slopes both tend to zero
        let slope = (eval_h(m, 1.0 - 1e-4, &a).unwrap() - below) / (1e-4 - 1e-7);
        assert!(slope.abs() < 1e-4, "m={m}: slope {slope}");
    }
}

#[test]
fn kernels_non_increasing_in_u() {
    let a = PolytropicAnsatz::plain_power_law(0.0, -0.3, 1.0, 1.0).unwrap();
    let mut last = f64::INFINITY;
    for i in 1..60 {
        let u = i as f64 / 50.0;
        let h = eval_h(1.2, u, &a).unwrap();
        assert!(h >= 0.0 && h <= last);
        last = h;
    }
}

#[test]
fn tabulated_matches_equivalent_analytic_law() {
    // Ψ(E) = (1 - E) sampled densely: monotone cubic reproduces a linear law exactly
    let energies: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
    let values: Vec<f64> = energies.iter().map(|e| 1.0 - e).collect();
    let table = nvsteady::ansatz::PsiTable::new(energies, values).unwrap();
    let tab = PolytropicAnsatz::tabulated(0.0, 1.0, table, 1.0).unwrap();
    let ana = PolytropicAnsatz::plain_power_law(0.0, 1.0, 1.0, 1.0).unwrap();
    for &(m, u) in &[(0.5, 0.2), (1.5, 0.6)] {
        let t = eval_h(m, u, &tab).unwrap();
        let a = eval_h(m, u, &ana).unwrap();
        assert!(((t - a) / a).abs() < 1e-8, "{t} vs {a}");
    }
}

proptest! {
    #[test]
    fn beta_symmetric_positive_and_recurrent(a in -0.95f64..6.0, b in -0.95f64..6.0) {
        let ab = beta_coeff(a, b).unwrap();
        let ba = beta_coeff(b, a).unwrap();
        prop_assert!(ab > 0.0);
        prop_assert!(((ab - ba) / ab).abs() < 1e-13);
        let next = beta_coeff(a + 1.0, b).unwrap();
        prop_assert!(((next - ab * (a + 1.0) / (a + b + 2.0)) / next).abs() < 1e-12);
    }

    #[test]
    fn beta_matches_direct_quadrature(a in 0.0f64..4.0, b in 0.0f64..4.0) {
        let cfg = QuadratureConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_panels: 500 };
        let direct = integrate(|s| s.powf(a) * (1.0 - s).powf(b), 0.0, 1.0, &cfg).unwrap();
        let c = beta_coeff(a, b).unwrap();
        prop_assert!(((direct - c) / c).abs() < 1e-9);
    }
}
