//! Outward integration of the reduced field equation.
//!
//! The state is `(φ, v)` with `v = r²φ′`:
//!
//! ```text
//! φ′ = v / r²,    v′ = π c_{k,-1/2} r^{2k+2} e^{2φ} h_{k+1/2}(e^φ)
//! ```
//!
//! The quotient `v/r²` is singular at the centre, so the interval `[0, δ]` is
//! covered by the fixed point of the integral operator
//!
//! ```text
//! (Tu)(r) = u₀ + π c_{k,-1/2} ∫₀ʳ u(s)/s² ∫₀ˢ τ^{2k+2} u(τ)² h_{k+1/2}(u(τ)) dτ ds,   u = e^φ
//! ```
//!
//! and the adaptive integrator takes over at `r = δ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::interp::{hermite, locate, weighted_linear};
use crate::ode::{DenseSegment, OdeSystem, StepController, Stepper, StepperConfig};
use crate::special::gamma::beta_unchecked;
use crate::special::{Kernels, QuadratureConfig};
use crate::{Error, PolytropicAnsatz, Result};

const SEED_NODES: usize = 32;
const MAX_HALVINGS: usize = 20;
const MAX_PICARD_ITERATIONS: usize = 200;
const BOUNDARY_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverNumerics {
    /// Seed interval δ. `None` selects `10⁻³·min(1, 1/E₀)`.
    pub seed_interval: Option<f64>,
    /// Sup-norm tolerance of the Picard iteration, in `u = e^φ`.
    pub picard_tolerance: f64,
    pub ode_abs_tol: f64,
    pub ode_rel_tol: f64,
    pub max_radius: f64,
    /// ε_R: the support ends where `E₀ − e^φ ≤ ε_R·E₀`.
    pub radius_tolerance: f64,
    /// Upper bound on the step. `None` picks 1/256 of the constant-source radius estimate.
    pub max_step: Option<f64>,
    pub controller: StepController,
    pub quadrature: QuadratureConfig,
}

impl Default for SolverNumerics {
    fn default() -> Self {
        Self {
            seed_interval: None,
            picard_tolerance: 1e-14,
            ode_abs_tol: 1e-10,
            ode_rel_tol: 1e-8,
            max_radius: 1e3,
            radius_tolerance: 1e-8,
            max_step: None,
            controller: StepController::Integral,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl SolverNumerics {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if let Some(d) = self.seed_interval {
            if !positive(d) {
                return Err(Error::InvalidNumerics("seed interval must be positive"));
            }
            if !(d < self.max_radius) {
                return Err(Error::InvalidNumerics("max_radius must exceed the seed interval"));
            }
        }
        if !positive(self.picard_tolerance) {
            return Err(Error::InvalidNumerics("picard tolerance must be positive"));
        }
        if !positive(self.ode_abs_tol) || !positive(self.ode_rel_tol) {
            return Err(Error::InvalidNumerics("ode tolerances must be positive"));
        }
        if !positive(self.max_radius) {
            return Err(Error::InvalidNumerics("max_radius must be positive"));
        }
        if !positive(self.radius_tolerance) || self.radius_tolerance >= 1.0 {
            return Err(Error::InvalidNumerics("radius tolerance must lie in (0, 1)"));
        }
        if let Some(h) = self.max_step {
            if !positive(h) {
                return Err(Error::InvalidNumerics("max_step must be positive"));
            }
        }
        let q = &self.quadrature;
        if !(q.abs_tol >= 0.0 && q.rel_tol >= 0.0 && q.abs_tol + q.rel_tol > 0.0 && q.max_panels > 0) {
            return Err(Error::InvalidNumerics("quadrature tolerances must be non-negative with a positive budget"));
        }
        Ok(())
    }

    fn default_seed(&self, e0: f64) -> f64 {
        self.seed_interval.unwrap_or(1e-3 * (1.0f64).min(1.0 / e0))
    }
}

/// How the outward integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Closure {
    /// `φ₀ ≥ log E₀`: no matter at all, support radius zero.
    Vacuum,
    /// `e^φ` reached `E₀(1 − ε_R)` at `radius`.
    Closed { radius: f64 },
    /// `max_radius` was reached with `e^φ` still below threshold.
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    /// `v = r²φ′` as carried by the integrator.
    pub flux: Vec<f64>,
    pub phi0: f64,
    pub ansatz: PolytropicAnsatz,
    pub numerics: SolverNumerics,
    /// δ actually used after any halvings.
    pub seed_interval: f64,
    /// Nodes `0..seed_nodes` come from the Picard fixed point.
    pub seed_nodes: usize,
    pub closure: Closure,
    /// Dense output of the step that crossed the radius threshold.
    pub final_step: Option<DenseSegment<2>>,
    pub accepted_steps: usize,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Radius of the last node.
    pub fn outer_radius(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    /// Cubic Hermite interpolation of `(φ, φ′)` inside the grid.
    pub fn interpolate(&self, r: f64) -> (f64, f64) {
        if self.grid.len() == 1 {
            return (self.phi[0], 0.0);
        }
        let i = locate(&self.grid, r);
        hermite(
            self.grid[i],
            self.grid[i + 1],
            self.phi[i],
            self.phi[i + 1],
            self.dphi[i],
            self.dphi[i + 1],
            r,
        )
    }
}

/// Right-hand side of the field equation bound to one ansatz.
#[derive(Debug, Clone, Copy)]
pub struct FieldSource<'a> {
    kernels: Kernels<'a>,
    coeff: f64,
}

impl<'a> FieldSource<'a> {
    pub fn new(ansatz: &'a PolytropicAnsatz, quadrature: QuadratureConfig) -> Self {
        let coeff = PI * beta_unchecked(ansatz.k, -0.5);
        Self { kernels: Kernels::with_quadrature(ansatz, quadrature), coeff }
    }

    /// `e^{2φ} h_{k+1/2}(e^φ)`, the part of the source that depends on φ only.
    pub fn reduced(&self, phi: f64) -> Result<f64> {
        let u = libm::exp(phi);
        let a = self.kernels.ansatz;
        if u >= a.e0 || a.amplitude == 0.0 {
            return Ok(0.0);
        }
        Ok(u * u * self.kernels.h(a.k + 0.5, u)?)
    }

    pub fn rhs(&self, r: f64, phi: f64) -> Result<f64> {
        let w = self.reduced(phi)?;
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(self.coeff * libm::pow(r, 2.0 * self.kernels.ansatz.k + 2.0) * w)
    }
}

impl OdeSystem<2> for FieldSource<'_> {
    fn rhs(&self, r: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
        Ok([y[1] / (r * r), FieldSource::rhs(self, r, y[0])?])
    }
}

/// `π c_{k,-1/2} r^{2k+2} e^{2φ} h_{k+1/2}(e^φ)`.
pub fn field_rhs(r: f64, phi_val: f64, ansatz: &PolytropicAnsatz) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain { what: "field_rhs requires r > 0", value: r });
    }
    FieldSource::new(ansatz, QuadratureConfig::default()).rhs(r, phi_val)
}

struct Seed {
    grid: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    flux: Vec<f64>,
}

fn picard_on(delta: f64, phi0: f64, src: &FieldSource<'_>, tol: f64) -> Result<Option<Seed>> {
    let k = src.kernels.ansatz.k;
    let p_inner = 2.0 * k + 2.0;
    let p_outer = 2.0 * k + 1.0;
    let n = SEED_NODES;
    let grid: Vec<f64> = (0..=n).map(|i| delta * i as f64 / n as f64).collect();
    let u0 = libm::exp(phi0);
    let mut u = alloc::vec![u0; n + 1];
    let mut inner = alloc::vec![0.0; n + 1];
    let mut last_diff = f64::INFINITY;

    for iter in 0..MAX_PICARD_ITERATIONS {
        // I(s) = ∫₀ˢ τ^{2k+2} u²h(u) dτ with u²h(u) piecewise linear
        let w: Vec<f64> = u.iter().map(|&ui| src.reduced(libm::log(ui))).collect::<Result<_>>()?;
        inner[0] = 0.0;
        for i in 1..=n {
            inner[i] = inner[i - 1] + weighted_linear(grid[i - 1], grid[i], w[i - 1], w[i], p_inner);
        }
        // u(r) = u₀ + πc ∫₀ʳ u(s) J(s) s^{2k+1} ds with J = I/s^{2k+3} smooth
        let j = |i: usize| {
            if i == 0 {
                w[0] / (2.0 * k + 3.0)
            } else {
                inner[i] / libm::pow(grid[i], 2.0 * k + 3.0)
            }
        };
        let mut next = alloc::vec![u0; n + 1];
        let mut acc = 0.0;
        for i in 1..=n {
            acc += weighted_linear(grid[i - 1], grid[i], u[i - 1] * j(i - 1), u[i] * j(i), p_outer);
            next[i] = u0 + src.coeff * acc;
        }
        let diff = next.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if next.iter().any(|&v| !(v <= u0 + 1.0)) {
            return Ok(None);
        }
        u = next;
        if diff <= tol {
            break;
        }
        if iter >= 1 && diff > 0.5 * last_diff {
            return Ok(None);
        }
        if iter + 1 == MAX_PICARD_ITERATIONS {
            return Ok(None);
        }
        last_diff = diff;
    }

    let w: Vec<f64> = u.iter().map(|&ui| src.reduced(libm::log(ui))).collect::<Result<_>>()?;
    // φ′ = πc I(r)/r² on the converged iterate
    let mut acc = 0.0;
    let mut dphi = alloc::vec![0.0; n + 1];
    let mut flux = alloc::vec![0.0; n + 1];
    for i in 1..=n {
        acc += weighted_linear(grid[i - 1], grid[i], w[i - 1], w[i], p_inner);
        flux[i] = src.coeff * acc;
        dphi[i] = flux[i] / (grid[i] * grid[i]);
    }
    let phi = u.iter().map(|&ui| libm::log(ui)).collect();
    Ok(Some(Seed { grid, phi, dphi, flux }))
}

fn vacuum_profile(phi0: f64, ansatz: &PolytropicAnsatz, numerics: &SolverNumerics, delta: f64, closure: Closure) -> RadialProfile {
    let grid: Vec<f64> = (0..=SEED_NODES).map(|i| delta * i as f64 / SEED_NODES as f64).collect();
    let n = grid.len();
    RadialProfile {
        grid,
        phi: alloc::vec![phi0; n],
        dphi: alloc::vec![0.0; n],
        flux: alloc::vec![0.0; n],
        phi0,
        ansatz: ansatz.clone(),
        numerics: *numerics,
        seed_interval: delta,
        seed_nodes: n,
        closure,
        final_step: None,
        accepted_steps: 0,
    }
}

/// The Picard fixed point on `[0, δ]`, halving δ until the operator contracts.
pub fn picard_seed(phi0: f64, ansatz: &PolytropicAnsatz, numerics: &SolverNumerics) -> Result<RadialProfile> {
    numerics.validate()?;
    if !phi0.is_finite() {
        return Err(Error::Domain { what: "phi0 must be finite", value: phi0 });
    }
    let mut delta = numerics.default_seed(ansatz.e0);
    if phi0 >= libm::log(ansatz.e0) || ansatz.is_vacuum_source() {
        let closure = if ansatz.is_vacuum_source() && phi0 < libm::log(ansatz.e0) { Closure::Open } else { Closure::Vacuum };
        return Ok(vacuum_profile(phi0, ansatz, numerics, delta, closure));
    }
    let src = FieldSource::new(ansatz, numerics.quadrature);
    let tol = numerics.picard_tolerance * libm::exp(phi0).max(1.0);
    for _ in 0..=MAX_HALVINGS {
        if let Some(seed) = picard_on(delta, phi0, &src, tol)? {
            let n = seed.grid.len();
            return Ok(RadialProfile {
                grid: seed.grid,
                phi: seed.phi,
                dphi: seed.dphi,
                flux: seed.flux,
                phi0,
                ansatz: ansatz.clone(),
                numerics: *numerics,
                seed_interval: delta,
                seed_nodes: n,
                closure: Closure::Open,
                final_step: None,
                accepted_steps: 0,
            });
        }
        delta *= 0.5;
    }
    Err(Error::ContractionFailure { delta })
}

/// Step bound used when `max_step` is unset.
fn auto_max_step(phi0: f64, ansatz: &PolytropicAnsatz, src: &FieldSource<'_>, numerics: &SolverNumerics) -> Result<f64> {
    let cap = numerics.max_radius / 100.0;
    if let Some(h) = numerics.max_step {
        return Ok(h);
    }
    let a0 = src.rhs(1.0, phi0)?;
    if !(a0 > 0.0) {
        return Ok(cap);
    }
    let k = ansatz.k;
    let gap = libm::log(ansatz.e0) - phi0;
    let l = libm::pow((2.0 * k + 2.0) * (2.0 * k + 3.0) * gap / a0, 1.0 / (2.0 * k + 2.0));
    Ok((l / 256.0).min(cap))
}

fn threshold(ansatz: &PolytropicAnsatz, eps: f64) -> f64 {
    libm::log(ansatz.e0) + libm::log1p(-eps)
}

/// Smallest `r` in the segment where `φ ≥ level`, by bisection on the dense output.
fn bisect_level(seg: &DenseSegment<2>, level: f64) -> f64 {
    let (mut lo, mut hi) = (seg.t0, seg.t1());
    if seg.eval(hi)[0] < level {
        return hi;
    }
    if seg.eval(lo)[0] >= level {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if seg.eval(mid)[0] >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Integrate from the centre until `e^φ` reaches `E₀(1 − ε_R)` or `max_radius`.
///
/// Near the crossing the last step is redone through a geometric cluster of
/// nodes accumulating at the radius, so boundary diagnostics see small η.
pub fn integrate_steady_state(phi0: f64, ansatz: &PolytropicAnsatz, numerics: &SolverNumerics) -> Result<RadialProfile> {
    let mut profile = picard_seed(phi0, ansatz, numerics)?;
    if profile.closure == Closure::Vacuum {
        return Ok(profile);
    }
    let level = threshold(ansatz, numerics.radius_tolerance);
    if ansatz.is_vacuum_source() {
        // constant field; integration is trivial
        let r_max = numerics.max_radius;
        profile.grid.push(r_max);
        profile.phi.push(phi0);
        profile.dphi.push(0.0);
        profile.flux.push(0.0);
        profile.closure = Closure::Open;
        return Ok(profile);
    }
    if phi0 >= level {
        profile.closure = Closure::Closed { radius: 0.0 };
        return Ok(profile);
    }

    let src = FieldSource::new(ansatz, numerics.quadrature);
    let max_step = auto_max_step(phi0, ansatz, &src, numerics)?;
    let cfg = StepperConfig {
        abs_tol: numerics.ode_abs_tol,
        rel_tol: numerics.ode_rel_tol,
        max_step,
        controller: numerics.controller,
    };
    let delta = profile.seed_interval;
    let mut stepper = Stepper::new(cfg, max_step.min(10.0 * delta));
    let last = profile.grid.len() - 1;
    let mut r = delta;
    let mut y = [profile.phi[last], profile.flux[last]];

    loop {
        let step = stepper.step(&src, r, &y, numerics.max_radius)?;
        profile.accepted_steps += 1;
        if step.y[0] >= level {
            let r_star = bisect_level(&step.dense, level);
            let (r_end, seg) = refine_to_boundary(&src, cfg, r, y, r_star, &mut profile)?;
            let radius = bisect_level(&seg, level).min(r_end);
            profile.closure = Closure::Closed { radius };
            profile.final_step = Some(seg);
            return Ok(profile);
        }
        r = step.t;
        y = step.y;
        push_node(&mut profile, r, &y);
        if r >= numerics.max_radius {
            profile.closure = Closure::Open;
            return Ok(profile);
        }
    }
}

fn push_node(profile: &mut RadialProfile, r: f64, y: &[f64; 2]) {
    profile.grid.push(r);
    profile.phi.push(y[0]);
    profile.dphi.push(y[1] / (r * r));
    profile.flux.push(y[1]);
}

/// Re-integrate the crossing step through nodes `r* − (r* − r₀)2^{-j}` and finally `r*`.
fn refine_to_boundary(
    src: &FieldSource<'_>,
    cfg: StepperConfig,
    r0: f64,
    y0: [f64; 2],
    r_star: f64,
    profile: &mut RadialProfile,
) -> Result<(f64, DenseSegment<2>)> {
    let gap = r_star - r0;
    let mut targets: Vec<f64> = (1..=BOUNDARY_NODES).map(|j| r_star - gap * libm::pow(2.0, -(j as f64))).collect();
    targets.push(r_star);
    targets.retain(|&t| t > r0);
    targets.dedup();
    let mut stepper = Stepper::new(cfg, 0.5 * gap);
    let (mut r, mut y) = (r0, y0);
    let mut seg = None;
    for &target in &targets {
        while r < target {
            let step = stepper.step(src, r, &y, target)?;
            profile.accepted_steps += 1;
            r = step.t;
            y = step.y;
            seg = Some(step.dense);
        }
        push_node(profile, r, &y);
    }
    let seg = seg.ok_or(Error::StepSizeUnderflow { r: r0, h: gap })?;
    Ok((r, seg))
}

/// Support radius: `Some(0)` for vacuum, `None` for an open run.
pub fn detect_radius(profile: &RadialProfile, ansatz: &PolytropicAnsatz, numerics: &SolverNumerics) -> Option<f64> {
    match profile.closure {
        Closure::Vacuum => Some(0.0),
        Closure::Open => None,
        Closure::Closed { radius } => match &profile.final_step {
            Some(seg) => {
                let level = threshold(ansatz, numerics.radius_tolerance);
                if seg.eval(seg.t1())[0] < level {
                    // looser threshold than the one used to stop: search the stored nodes
                    Some(first_crossing(profile, level).unwrap_or(radius))
                } else {
                    Some(first_crossing(profile, level).map_or(radius, |r| r.min(bisect_level(seg, level))))
                }
            }
            None => Some(radius),
        },
    }
}

/// First node-bracketed crossing of `level`, refined by Hermite bisection.
fn first_crossing(profile: &RadialProfile, level: f64) -> Option<f64> {
    let i = profile.phi.iter().position(|&p| p >= level)?;
    if i == 0 {
        return Some(0.0);
    }
    let (mut lo, mut hi) = (profile.grid[i - 1], profile.grid[i]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (p, _) = hermite(
            profile.grid[i - 1],
            profile.grid[i],
            profile.phi[i - 1],
            profile.phi[i],
            profile.dphi[i - 1],
            profile.dphi[i],
            mid,
        );
        if p >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Per-interval defect of the integrated field equation,
/// `[(v_{i+1} − v_i) − ∫ (r²φ′)′ dr] / (r_{i+1} − r_i)` with the integral taken by
/// five-point Gauss along the Hermite interpolant of φ.
///
/// Unlike a nodewise check this measures the integration error itself.
pub fn flux_balance_residual(profile: &RadialProfile) -> Result<Vec<f64>> {
    let src = FieldSource::new(&profile.ansatz, profile.numerics.quadrature);
    let mut out = Vec::with_capacity(profile.len().saturating_sub(1));
    for i in 0..profile.len().saturating_sub(1) {
        let (a, b) = (profile.grid[i], profile.grid[i + 1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut integral = 0.0;
        for (x, w) in GAUSS5 {
            let r = mid + half * x;
            let (phi, _) = hermite(a, b, profile.phi[i], profile.phi[i + 1], profile.dphi[i], profile.dphi[i + 1], r);
            integral += w * src.rhs(r, phi)?;
        }
        integral *= half;
        out.push((profile.flux[i + 1] - profile.flux[i] - integral) / (b - a));
    }
    Ok(out)
}

/// The vacuum field `φ∞ − C/r` outside the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorLaw {
    pub radius: f64,
    pub phi_inf: f64,
    /// `C = R²φ′(R)`.
    pub charge: f64,
}

impl ExteriorLaw {
    pub fn phi(&self, r: f64) -> f64 {
        self.phi_inf - self.charge / r
    }

    pub fn dphi(&self, r: f64) -> f64 {
        self.charge / (r * r)
    }
}

/// Match the exterior law to the profile at `radius`.
pub fn extend_vacuum(profile: &RadialProfile, radius: f64) -> ExteriorLaw {
    let (phi, charge) = if radius >= profile.outer_radius() {
        let n = profile.len() - 1;
        (profile.phi[n], profile.flux[n])
    } else {
        let (phi, dphi) = profile.interpolate(radius);
        (phi, radius * radius * dphi)
    };
    let phi_inf = if radius > 0.0 { phi + charge / radius } else { phi };
    ExteriorLaw { radius, phi_inf, charge }
}

/// A steady state shifted so that `φ → 0` at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenedState {
    pub profile: RadialProfile,
    /// Factor `e^{4φ∞}` multiplying the particle density.
    pub density_factor: f64,
}

/// `φ̃ = φ − φ∞` with the ansatz rescaled so the pair solves the same equation.
pub fn asymptotic_flatten(profile: &RadialProfile, phi_inf: f64) -> FlattenedState {
    let mut shifted = profile.clone();
    if phi_inf != 0.0 {
        for p in shifted.phi.iter_mut() {
            *p -= phi_inf;
        }
        shifted.phi0 -= phi_inf;
        shifted.ansatz = profile.ansatz.shifted(phi_inf);
        shifted.final_step = None;
        if let Closure::Closed { radius } = profile.closure {
            shifted.closure = Closure::Closed { radius };
        }
    }
    FlattenedState { profile: shifted, density_factor: libm::exp(4.0 * phi_inf) }
}
