//! Sampled bound orbits in a solved field.

use std::fmt::Write as _;

use nvsteady::characteristics::{density_along, integrate_orbit, FieldInterpolant, OrbitConfig, OrbitState, Trajectory};
use nvsteady::{RadialProfile, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const HEADER: &str = "orbit,s,r,w,F,energy,density";

/// `n` reproducible bound states inside the support of radius `radius`.
///
/// Radii are uniform in `(0.05R, 0.95R)`; a uniform fraction of the kinetic budget
/// `E₀² − e^{2φ}` is split at random between `w²` and `F/r²`.
pub fn random_bound_states(field: &FieldInterpolant<'_>, radius: f64, n: usize, seed: u32) -> Result<Vec<OrbitState>> {
    let e0 = field.profile().ansatz.e0;
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(seed));
    (0..n)
        .map(|_| {
            let r = rng.gen_range(0.05..0.95) * radius;
            let (phi, _) = field.eval(r)?;
            let kinetic = rng.gen_range(0.05..0.95) * (e0 * e0 - (2.0 * phi).exp());
            let split: f64 = rng.gen_range(0.05..0.95);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            Ok(OrbitState { r, w: sign * (split * kinetic).sqrt(), f: (1.0 - split) * kinetic * r * r })
        })
        .collect()
}

pub fn write_trajectory(out: &mut String, id: usize, t: &Trajectory, profile: &RadialProfile) {
    let density = density_along(t, &profile.ansatz);
    for i in 0..t.len() {
        writeln!(out, "{id},{:?},{:?},{:?},{:?},{:?},{:?}", t.s[i], t.r[i], t.w[i], t.f, t.energy[i], density[i]).unwrap();
    }
}

/// Orbit CSV for `n` seeded random orbits, or `None` without a finite support.
pub fn emit_orbits(profile: &RadialProfile, radius: Option<f64>, n: usize, seed: u32, span: f64) -> Result<Option<String>> {
    let Some(radius) = radius.filter(|&r| r > 0.0) else {
        return Ok(None);
    };
    let field = FieldInterpolant::new(profile);
    let mut out = String::from(HEADER);
    out.push('\n');
    for (id, s) in random_bound_states(&field, radius, n, seed)?.into_iter().enumerate() {
        let t = integrate_orbit(&field, s, span, &OrbitConfig::default())?;
        write_trajectory(&mut out, id, &t, profile);
    }
    Ok(Some(out))
}
