use nvsteady::characteristics::{
    density_along, eval_density, eval_density_reduced, integrate_orbit, invariants_cartesian, reduced_energy, to_reduced,
    FieldInterpolant, OrbitConfig, OrbitState,
};
use nvsteady::observables::compute_source;
use nvsteady::solver::{detect_radius, integrate_steady_state};
use nvsteady::{PolytropicAnsatz, RadialProfile, SolverNumerics};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn baseline() -> (RadialProfile, f64) {
    let e0 = 0.9f64.sqrt();
    let a = PolytropicAnsatz::energy_weighted(0.0, 0.5, e0, 1.0).unwrap();
    let n = SolverNumerics::default();
    let p = integrate_steady_state((0.5 * e0).ln(), &a, &n).unwrap();
    let r = detect_radius(&p, &a, &n).unwrap();
    (p, r)
}

/// Random bound state at `r0` using a fraction of the kinetic budget `E₀² − e^{2φ}`.
fn random_state(rng: &mut ChaCha8Rng, field: &FieldInterpolant, radius: f64, e0: f64) -> OrbitState {
    let r = rng.gen_range(0.05..0.95) * radius;
    let (phi, _) = field.eval(r).unwrap();
    let budget = e0 * e0 - (2.0 * phi).exp();
    let kinetic = rng.gen_range(0.05..0.95) * budget;
    let split: f64 = rng.gen_range(0.05..0.95);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    OrbitState { r, w: sign * (split * kinetic).sqrt(), f: (1.0 - split) * kinetic * r * r }
}

fn rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    // Gram-Schmidt on a random matrix
    let mut m = [[0.0; 3]; 3];
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let n0 = norm(m[0]);
    let a = m[0].map(|v| v / n0);
    let d = dot(m[1], a);
    let b0 = [m[1][0] - d * a[0], m[1][1] - d * a[1], m[1][2] - d * a[2]];
    let nb = norm(b0);
    let b = b0.map(|v| v / nb);
    let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    [a, b, c]
}

fn apply(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

#[test]
fn invariants_are_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let x = [0, 1, 2].map(|_| rng.gen_range(-3.0..3.0));
        let p = [0, 1, 2].map(|_| rng.gen_range(-2.0..2.0));
        let phi = rng.gen_range(-1.0..0.5);
        let a = rotation(&mut rng);
        let (e, f) = invariants_cartesian(x, p, phi);
        let (er, fr) = invariants_cartesian(apply(&a, x), apply(&a, p), phi);
        assert!((e - er).abs() <= 1e-14 * e);
        assert!((f - fr).abs() <= 1e-12 * f.max(1e-300));
        let s = to_reduced(x, p, phi).unwrap();
        let sr = to_reduced(apply(&a, x), apply(&a, p), phi).unwrap();
        assert!((s.w - sr.w).abs() < 1e-13 && (s.r - sr.r).abs() < 1e-13);
    }
}

proptest! {
    #[test]
    fn reduced_coordinates_split_momentum(
        x in prop::array::uniform3(-5.0f64..5.0),
        p in prop::array::uniform3(-3.0f64..3.0),
        phi in -2.0f64..1.0,
    ) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let s = to_reduced(x, p, phi).unwrap();
        let p2: f64 = p.iter().map(|v| v * v).sum();
        let lhs = s.w * s.w + s.f / (s.r * s.r);
        let rhs = (2.0 * phi).exp() * p2;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        let (e, _) = invariants_cartesian(x, p, phi);
        prop_assert!((reduced_energy(&s, phi) - 0.5 * e * e).abs() <= 1e-12 * e * e);
    }
}

#[test]
fn circular_orbit_stays_circular() {
    let (p, _) = baseline();
    let field = FieldInterpolant::new(&p);
    for &r in &[0.5, 2.0, 4.5] {
        let (phi, dphi) = field.eval(r).unwrap();
        let f = r.powi(3) * (2.0 * phi).exp() * dphi;
        let t = integrate_orbit(&field, OrbitState { r, w: 0.0, f }, 50.0, &OrbitConfig::default()).unwrap();
        let dev = t.r.iter().map(|x| (x - r).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-7 * r, "r = {r}: deviation {dev}");
    }
}

#[test]
fn free_motion_in_constant_field() {
    let a = PolytropicAnsatz::energy_weighted(0.0, 0.5, 1.0, 1.0).unwrap();
    let p = integrate_steady_state(0.2, &a, &SolverNumerics::default()).unwrap();
    let field = FieldInterpolant::new(&p);
    let (r0, w0, f) = (3.0, -0.6, 0.8);
    let t = integrate_orbit(&field, OrbitState { r: r0, w: w0, f }, 12.0, &OrbitConfig::default()).unwrap();
    // straight line: r² = F/v² + v²(s − s*)² with v² = w² + F/r²
    let v2 = w0 * w0 + f / (r0 * r0);
    let s_star = -r0 * w0 / v2;
    for i in 0..t.len() {
        let exact = (f / v2 + v2 * (t.s[i] - s_star).powi(2)).sqrt();
        assert!((t.r[i] - exact).abs() < 1e-9, "s = {}: {} vs {exact}", t.s[i], t.r[i]);
    }
    assert!(t.relative_energy_drift() < 1e-11, "{}", t.relative_energy_drift());
    // perihelion passed: w changes sign
    assert!(t.w[0] < 0.0 && *t.w.last().unwrap() > 0.0);
}

#[test]
fn jeans_consistency_on_random_orbits() {
    let (p, radius) = baseline();
    let e0 = p.ansatz.e0;
    let field = FieldInterpolant::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for n in 0..50 {
        let s = random_state(&mut rng, &field, radius, e0);
        let t = integrate_orbit(&field, s, 60.0, &OrbitConfig::default()).unwrap();
        assert!(t.relative_energy_drift() < 1e-8, "orbit {n}: drift {}", t.relative_energy_drift());
        let dens = density_along(&t, &p.ansatz);
        let d0 = eval_density_reduced(&s, &field).unwrap();
        assert!(d0 > 0.0);
        let var = dens.iter().map(|d| ((d - d0) / d0).abs()).fold(0.0, f64::max);
        assert!(var < 1e-6, "orbit {n}: density variation {var}");
        assert!(t.r.iter().all(|&r| r > 0.0 && r < radius), "orbit {n} left the support");
    }
}

#[test]
fn energy_drift_shrinks_with_tolerance() {
    let (p, radius) = baseline();
    let field = FieldInterpolant::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_state(&mut rng, &field, radius, p.ansatz.e0);
    let loose = OrbitConfig { abs_tol: 1e-9, rel_tol: 1e-8, ..Default::default() };
    let tight = OrbitConfig { abs_tol: 1e-11, rel_tol: 1e-10, ..Default::default() };
    let d1 = integrate_orbit(&field, s, 60.0, &loose).unwrap().relative_energy_drift();
    let d2 = integrate_orbit(&field, s, 60.0, &tight).unwrap().relative_energy_drift();
    assert!(d2 < 0.5 * d1, "{d1} -> {d2}");
}

#[test]
fn density_vanishes_above_cutoff_and_outside() {
    let (p, radius) = baseline();
    let field = FieldInterpolant::new(&p);
    let e0 = p.ansatz.e0;
    // at rest near the centre: E = e^{φ₀} < E₀
    assert!(eval_density([0.1, 0.0, 0.0], [0.0, 0.3, 0.0], &field).unwrap() > 0.0);
    // enough momentum to exceed the cut-off
    let (phi, _) = field.eval(1.0).unwrap();
    let pmax = ((e0 / phi.exp()).powi(2) - 1.0).sqrt();
    assert_eq!(eval_density([1.0, 0.0, 0.0], [0.0, 1.01 * pmax, 0.0], &field).unwrap(), 0.0);
    // beyond R every momentum has E ≥ e^φ ≥ E₀
    for r in [1.01 * radius, 2.0 * radius, 50.0 * radius] {
        assert_eq!(eval_density([r, 0.0, 0.0], [0.0, 0.0, 0.0], &field).unwrap(), 0.0);
        assert_eq!(eval_density([0.0, r, 0.0], [0.0, 0.0, 0.1], &field).unwrap(), 0.0);
    }
}

#[test]
fn monte_carlo_source_matches_reduced_source() {
    let (p, _) = baseline();
    let field = FieldInterpolant::new(&p);
    let a = &p.ansatz;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &r in &[0.7, 2.5, 4.0] {
        let x = [r, 0.0, 0.0];
        let (phi, _) = field.eval(r).unwrap();
        let pmax = ((a.e0 / phi.exp()).powi(2) - 1.0).sqrt();
        let volume = 4.0 / 3.0 * std::f64::consts::PI * pmax.powi(3);
        let n = 400_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let q = loop {
                let q = [0, 1, 2].map(|_| rng.gen_range(-pmax..pmax));
                if q.iter().map(|v| v * v).sum::<f64>() <= pmax * pmax {
                    break q;
                }
            };
            let q2: f64 = q.iter().map(|v| v * v).sum();
            let v = eval_density(x, q, &field).unwrap() / (1.0 + q2).sqrt();
            sum += v;
            sum2 += v * v;
        }
        let mean = sum / n as f64;
        let sigma = volume * ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
        // the Cartesian momentum integral of Φ carries twice the reduced normalization
        let mc = 0.5 * volume * mean;
        let exact = compute_source(r, phi, a).unwrap() / (4.0 * phi).exp();
        assert!((mc - exact).abs() < 4.0 * 0.5 * sigma, "r = {r}: {mc} vs {exact} (σ = {sigma})");
    }
}
