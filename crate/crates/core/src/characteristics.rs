//! Stellar orbits in a computed field.
//!
//! In the reduced variables `r = |x|`, `w = e^φ x·p/|x|`, `F = e^{2φ}|x ∧ p|²` the
//! characteristics are
//!
//! ```text
//! dr/ds = w,   dw/ds = F/r³ − e^{2φ}φ′,   dF/ds = 0,
//! ```
//!
//! and `Ẽ = ½w² + ½F/r² + ½e^{2φ} = ½E²` is conserved.

use alloc::vec::Vec;

use crate::interp::{hermite, locate};
use crate::ode::{OdeSystem, StepController, Stepper, StepperConfig};
use crate::solver::{extend_vacuum, Closure, ExteriorLaw, RadialProfile};
use crate::{Error, PolytropicAnsatz, Result};

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `(E, F) = (e^φ √(1+|p|²), e^{2φ}|x ∧ p|²)`.
pub fn invariants_cartesian(x: [f64; 3], p: [f64; 3], phi_val: f64) -> (f64, f64) {
    let u = libm::exp(phi_val);
    let c = cross(&x, &p);
    (u * libm::sqrt(1.0 + dot(&p, &p)), u * u * dot(&c, &c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState {
    pub r: f64,
    pub w: f64,
    pub f: f64,
}

pub fn to_reduced(x: [f64; 3], p: [f64; 3], phi_val: f64) -> Result<OrbitState> {
    let r = libm::sqrt(dot(&x, &x));
    if !(r > 0.0) {
        return Err(Error::Domain { what: "position must be away from the centre", value: r });
    }
    let u = libm::exp(phi_val);
    let xp = dot(&x, &p);
    // |x|²|p|² − (x·p)² = |x ∧ p|², computed without cancellation
    let c = cross(&x, &p);
    Ok(OrbitState { r, w: u * xp / r, f: u * u * dot(&c, &c) })
}

/// `Ẽ = ½w² + ½F/r² + ½e^{2φ}`.
pub fn reduced_energy(state: &OrbitState, phi_val: f64) -> f64 {
    0.5 * state.w * state.w + 0.5 * state.f / (state.r * state.r) + 0.5 * libm::exp(2.0 * phi_val)
}

/// `φ` on all of `(0, ∞)`: Hermite cubics on the grid, the vacuum law beyond a closed support.
#[derive(Debug, Clone)]
pub struct FieldInterpolant<'a> {
    profile: &'a RadialProfile,
    exterior: Option<ExteriorLaw>,
}

impl<'a> FieldInterpolant<'a> {
    pub fn new(profile: &'a RadialProfile) -> Self {
        let exterior = match profile.closure {
            Closure::Open if !profile.ansatz.is_vacuum_source() => None,
            _ => Some(extend_vacuum(profile, profile.outer_radius())),
        };
        Self { profile, exterior }
    }

    pub fn profile(&self) -> &RadialProfile {
        self.profile
    }

    /// `(φ(r), φ′(r))`; the derivative is that of the interpolating cubic.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        let p = self.profile;
        if !(r >= 0.0) {
            return Err(Error::Domain { what: "radius must be non-negative", value: r });
        }
        if p.len() == 1 {
            return Ok((p.phi[0], 0.0));
        }
        let outer = p.outer_radius();
        if r <= outer {
            let i = locate(&p.grid, r);
            return Ok(hermite(p.grid[i], p.grid[i + 1], p.phi[i], p.phi[i + 1], p.dphi[i], p.dphi[i + 1], r));
        }
        match &self.exterior {
            Some(ext) if outer > 0.0 => Ok((ext.phi(r), ext.dphi(r))),
            Some(_) => Ok((p.phi[0], 0.0)),
            None => Err(Error::Domain { what: "orbit left the computed field", value: r }),
        }
    }

    /// `φ∞`, when the field is known at infinity.
    pub fn phi_inf(&self) -> Option<f64> {
        self.exterior.map(|e| e.phi_inf)
    }
}

struct Characteristic<'a, 'b> {
    field: &'b FieldInterpolant<'a>,
    f: f64,
}

impl OdeSystem<2> for Characteristic<'_, '_> {
    fn rhs(&self, _s: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
        let r = y[0];
        if !(r > 0.0) {
            return Err(Error::Domain { what: "orbit reached the centre", value: r });
        }
        let (phi, dphi) = self.field.eval(r)?;
        Ok([y[1], self.f / (r * r * r) - libm::exp(2.0 * phi) * dphi])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub controller: StepController,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-12, max_step: f64::INFINITY, controller: StepController::Integral }
    }
}

/// Accepted steps of one orbit; `f` is the conserved `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub f: f64,
    /// `Ẽ` at every sample.
    pub energy: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn state(&self, i: usize) -> OrbitState {
        OrbitState { r: self.r[i], w: self.w[i], f: self.f }
    }

    /// `max |Ẽ(s) − Ẽ(0)| / Ẽ(0)`.
    pub fn relative_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max)
    }
}

/// Integrate the characteristic system over `s ∈ [0, span]`.
pub fn integrate_orbit(
    field: &FieldInterpolant<'_>,
    initial: OrbitState,
    span: f64,
    cfg: &OrbitConfig,
) -> Result<Trajectory> {
    if !(initial.f > 0.0) {
        return Err(Error::Domain { what: "F must be positive", value: initial.f });
    }
    if !(initial.r > 0.0) {
        return Err(Error::Domain { what: "orbit must start away from the centre", value: initial.r });
    }
    if !(span > 0.0) || !span.is_finite() {
        return Err(Error::Domain { what: "span must be positive and finite", value: span });
    }
    let sys = Characteristic { field, f: initial.f };
    let energy = |r: f64, w: f64| -> Result<f64> {
        let (phi, _) = field.eval(r)?;
        Ok(reduced_energy(&OrbitState { r, w, f: initial.f }, phi))
    };
    let mut traj = Trajectory {
        s: Vec::from([0.0]),
        r: Vec::from([initial.r]),
        w: Vec::from([initial.w]),
        f: initial.f,
        energy: Vec::from([energy(initial.r, initial.w)?]),
    };
    let stepper_cfg = StepperConfig {
        abs_tol: cfg.abs_tol,
        rel_tol: cfg.rel_tol,
        max_step: cfg.max_step.min(span),
        controller: cfg.controller,
    };
    // initial step from the local dynamical time r/√(2Ẽ)
    let h0 = 1e-3 * initial.r / libm::sqrt(2.0 * traj.energy[0]).max(1e-300);
    let mut stepper = Stepper::new(stepper_cfg, h0.min(span));
    let (mut s, mut y) = (0.0, [initial.r, initial.w]);
    while s < span {
        let step = stepper.step(&sys, s, &y, span)?;
        s = step.t;
        y = step.y;
        traj.s.push(s);
        traj.r.push(y[0]);
        traj.w.push(y[1]);
        traj.energy.push(energy(y[0], y[1])?);
    }
    Ok(traj)
}

/// `Φ(E, F) = Ψ(E)F^k` at a phase-space point, `φ` taken from the field.
pub fn eval_density(x: [f64; 3], p: [f64; 3], field: &FieldInterpolant<'_>) -> Result<f64> {
    let r = libm::sqrt(dot(&x, &x));
    let (phi, _) = field.eval(r)?;
    let (e, f) = invariants_cartesian(x, p, phi);
    Ok(field.profile().ansatz.density(e, f))
}

/// [`eval_density`] for a reduced state.
pub fn eval_density_reduced(state: &OrbitState, field: &FieldInterpolant<'_>) -> Result<f64> {
    let (phi, _) = field.eval(state.r)?;
    Ok(density_from_energy(reduced_energy(state, phi), state.f, &field.profile().ansatz))
}

fn density_from_energy(reduced: f64, f: f64, ansatz: &PolytropicAnsatz) -> f64 {
    ansatz.density(libm::sqrt(2.0 * reduced), f)
}

/// `Φ` along a trajectory, from the stored `Ẽ`.
pub fn density_along(traj: &Trajectory, ansatz: &PolytropicAnsatz) -> Vec<f64> {
    traj.energy.iter().map(|&e| density_from_energy(e, traj.f, ansatz)).collect()
}
