//! Matter observables on a solved profile, global integrals, and the
//! residuals of the equilibrium identities.
//!
//! Pointwise quantities follow the reduced kernel forms
//!
//! ```text
//! ρ   = π r^{2k} c_{k,-1/2} g_{k+1/2}(e^φ)
//! 𝒫   = π r^{2k} c_{k,1/2}  h_{k+3/2}(e^φ)
//! 𝒫_T = ½π r^{2k} c_{k+1,-1/2} h_{k+3/2}(e^φ)
//! ```
//!
//! and the source of the field equation is `π c_{k,-1/2} r^{2k} e^{2φ} h_{k+1/2}(e^φ)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::finite_radius::{alpha_limit, beta_dyn_limit, beta_limit, check_window, FiniteRadiusDiagnostics};
use crate::interp::weighted_linear;
use crate::solver::{extend_vacuum, Closure, RadialProfile};
use crate::special::gamma::beta_unchecked;
use crate::special::{Kernels, QuadratureConfig};
use crate::{Error, PolytropicAnsatz, Result};

/// The three Beta coefficients entering ρ, 𝒫 and 𝒫_T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    /// `c_{k,-1/2}`
    pub rho: f64,
    /// `c_{k,1/2}`
    pub radial: f64,
    /// `c_{k+1,-1/2}`
    pub tangential: f64,
}

impl Coefficients {
    pub fn new(k: f64) -> Self {
        Self { rho: beta_unchecked(k, -0.5), radial: beta_unchecked(k, 0.5), tangential: beta_unchecked(k + 1.0, -0.5) }
    }
}

/// Kernel values at one node, `u = e^φ`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeKernels {
    pub u: f64,
    /// `h_{k-1/2}(u)`
    pub h_lo: f64,
    /// `h_{k+1/2}(u)`
    pub h: f64,
    /// `h_{k+3/2}(u)`
    pub h_hi: f64,
    /// `g_{k+1/2}(u)`
    pub g: f64,
    /// `g_{k-1/2}(u)`
    pub g_lo: f64,
    /// `∫ Ψ E (E² − u²)^{k+1/2} dE`
    pub number: f64,
    /// `∫ Ψ E (E² − u²)^{k-1/2} dE`
    pub number_lo: f64,
}

impl NodeKernels {
    pub fn evaluate(phi: f64, ansatz: &PolytropicAnsatz, quadrature: QuadratureConfig) -> Result<Self> {
        let u = libm::exp(phi);
        if u >= ansatz.e0 || ansatz.amplitude == 0.0 {
            return Ok(Self { u, ..Default::default() });
        }
        let kern = Kernels::with_quadrature(ansatz, quadrature);
        let k = ansatz.k;
        Ok(Self {
            u,
            h_lo: kern.h(k - 0.5, u)?,
            h: kern.h(k + 0.5, u)?,
            h_hi: kern.h(k + 1.5, u)?,
            g: kern.g(k + 0.5, u)?,
            g_lo: kern.g(k - 0.5, u)?,
            number: kern.energy_moment(k + 0.5, 1, u)?,
            number_lo: kern.energy_moment(k - 0.5, 1, u)?,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.h == 0.0 && self.g == 0.0
    }
}

/// `r^{2k}`; the value at `r = 0` for `k < 0` is the (vanishing) limit of `r²·r^{2k}`.
fn radial_power(r: f64, k: f64) -> f64 {
    if r == 0.0 {
        if k == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        libm::pow(r, 2.0 * k)
    }
}

fn check_radius(r: f64, k: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::Domain { what: "radius must be non-negative", value: r });
    }
    if r == 0.0 && k < 0.0 {
        return Err(Error::Domain { what: "observables diverge at the centre for k < 0", value: k });
    }
    Ok(())
}

/// `ρ = π r^{2k} c_{k,-1/2} g_{k+1/2}(e^φ)`.
pub fn compute_rho(r: f64, phi_val: f64, ansatz: &PolytropicAnsatz) -> Result<f64> {
    check_radius(r, ansatz.k)?;
    let u = libm::exp(phi_val);
    if u >= ansatz.e0 {
        return Ok(0.0);
    }
    let g = Kernels::new(ansatz).g(ansatz.k + 0.5, u)?;
    Ok(PI * radial_power(r, ansatz.k) * beta_unchecked(ansatz.k, -0.5) * g)
}

/// `(𝒫, 𝒫_T)`.
pub fn compute_pressures(r: f64, phi_val: f64, ansatz: &PolytropicAnsatz) -> Result<(f64, f64)> {
    check_radius(r, ansatz.k)?;
    let u = libm::exp(phi_val);
    if u >= ansatz.e0 {
        return Ok((0.0, 0.0));
    }
    let h = Kernels::new(ansatz).h(ansatz.k + 1.5, u)?;
    let c = Coefficients::new(ansatz.k);
    let w = PI * radial_power(r, ansatz.k) * h;
    Ok((w * c.radial, 0.5 * w * c.tangential))
}

/// Source density `e^{4φ}μ = π c_{k,-1/2} r^{2k} e^{2φ} h_{k+1/2}(e^φ)`.
pub fn compute_source(r: f64, phi_val: f64, ansatz: &PolytropicAnsatz) -> Result<f64> {
    check_radius(r, ansatz.k)?;
    let u = libm::exp(phi_val);
    if u >= ansatz.e0 {
        return Ok(0.0);
    }
    let h = Kernels::new(ansatz).h(ansatz.k + 0.5, u)?;
    Ok(PI * radial_power(r, ansatz.k) * beta_unchecked(ansatz.k, -0.5) * u * u * h)
}

/// Particle density `e^{3φ}∫Φ dp` in the normalization of ρ:
/// `π c_{k,-1/2} r^{2k} ∫ Ψ(E) E (E² − e^{2φ})^{k+1/2} dE`.
pub fn particle_density(r: f64, phi_val: f64, ansatz: &PolytropicAnsatz) -> Result<f64> {
    check_radius(r, ansatz.k)?;
    let u = libm::exp(phi_val);
    if u >= ansatz.e0 {
        return Ok(0.0);
    }
    // angular factor ∫₀¹ sᵏ(1−s)^{-1/2} ds, by quadrature
    let cfg = QuadratureConfig::default();
    let angular = crate::special::quadrature::beta_weighted(ansatz.k, -0.5, |_| 1.0, &cfg)?;
    let radial = Kernels::new(ansatz).energy_moment(ansatz.k + 0.5, 1, u)?;
    Ok(PI * radial_power(r, ansatz.k) * angular * radial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableProfile {
    pub rho: Vec<f64>,
    pub pressure: Vec<f64>,
    pub pressure_t: Vec<f64>,
    pub source: Vec<f64>,
    /// `m(r) = ∫₀ʳ s²(ρ − (2k+3)𝒫) ds`.
    pub mass_cumulative: Vec<f64>,
    /// Set when `k < 0`: the centre node stores the vanishing limit of `r²·quantity`.
    pub center_singular: bool,
    pub kernels: Vec<NodeKernels>,
    pub coefficients: Coefficients,
}

impl ObservableProfile {
    pub fn compute(profile: &RadialProfile) -> Result<Self> {
        let ansatz = &profile.ansatz;
        let k = ansatz.k;
        let c = Coefficients::new(k);
        let n = profile.len();
        let mut out = Self {
            rho: Vec::with_capacity(n),
            pressure: Vec::with_capacity(n),
            pressure_t: Vec::with_capacity(n),
            source: Vec::with_capacity(n),
            mass_cumulative: Vec::new(),
            center_singular: k < 0.0,
            kernels: Vec::with_capacity(n),
            coefficients: c,
        };
        for i in 0..n {
            let nk = NodeKernels::evaluate(profile.phi[i], ansatz, profile.numerics.quadrature)?;
            let w = PI * radial_power(profile.grid[i], k);
            out.rho.push(w * c.rho * nk.g);
            out.pressure.push(w * c.radial * nk.h_hi);
            out.pressure_t.push(0.5 * w * c.tangential * nk.h_hi);
            out.source.push(w * c.rho * nk.u * nk.u * nk.h);
            out.kernels.push(nk);
        }
        let m = Integrand::flux(profile, &out);
        out.mass_cumulative = m.cumulative(&profile.grid, &all_indices(n));
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

fn all_indices(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn coarse_indices(n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).step_by(2).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    idx
}

/// `f = r^p w(r)` with `w` smooth, together with `f′`.
struct Integrand {
    p: f64,
    w: Vec<f64>,
    f: Vec<f64>,
    df: Vec<f64>,
}

impl Integrand {
    /// `r² q = π c r^{2k+2} u² h_{k+1/2}`.
    fn flux(profile: &RadialProfile, obs: &ObservableProfile) -> Self {
        let k = profile.ansatz.k;
        let c = PI * obs.coefficients.rho;
        let n = profile.len();
        let mut it = Self::with_capacity(2.0 * k + 2.0, n);
        for i in 0..n {
            let (r, d, nk) = (profile.grid[i], profile.dphi[i], &obs.kernels[i]);
            let u2 = nk.u * nk.u;
            let w = c * u2 * nk.h;
            let dw = c * u2 * d * (2.0 * nk.h - (2.0 * k + 1.0) * u2 * nk.h_lo);
            it.push(r, w, dw);
        }
        it
    }

    /// `r² ρ = π c r^{2k+2} g_{k+1/2}`.
    fn mass(profile: &RadialProfile, obs: &ObservableProfile) -> Self {
        let k = profile.ansatz.k;
        let c = PI * obs.coefficients.rho;
        let n = profile.len();
        let mut it = Self::with_capacity(2.0 * k + 2.0, n);
        for i in 0..n {
            let (r, d, nk) = (profile.grid[i], profile.dphi[i], &obs.kernels[i]);
            let w = c * nk.g;
            let dw = -c * (2.0 * k + 1.0) * nk.u * nk.u * d * nk.g_lo;
            it.push(r, w, dw);
        }
        it
    }

    /// `r² n = π c r^{2k+2} ∫ΨE(E² − u²)^{k+1/2}`.
    fn particles(profile: &RadialProfile, obs: &ObservableProfile, angular: f64) -> Self {
        let k = profile.ansatz.k;
        let c = PI * angular;
        let n = profile.len();
        let mut it = Self::with_capacity(2.0 * k + 2.0, n);
        for i in 0..n {
            let (r, d, nk) = (profile.grid[i], profile.dphi[i], &obs.kernels[i]);
            let w = c * nk.number;
            let dw = -c * (2.0 * k + 1.0) * nk.u * nk.u * d * nk.number_lo;
            it.push(r, w, dw);
        }
        it
    }

    /// `r²φ′² = v²/r² = r^{4k+4}(v/r^{2k+3})²`, `f′ = 2φ′v′ − 2rφ′²`.
    fn field(profile: &RadialProfile, obs: &ObservableProfile) -> Self {
        let k = profile.ansatz.k;
        let n = profile.len();
        let p = 4.0 * k + 4.0;
        let mut it = Self { p, w: Vec::with_capacity(n), f: Vec::with_capacity(n), df: Vec::with_capacity(n) };
        for i in 0..n {
            let (r, d, v) = (profile.grid[i], profile.dphi[i], profile.flux[i]);
            let dv = r * r * obs.source[i];
            if r == 0.0 {
                let nk = &obs.kernels[0];
                let lead = PI * obs.coefficients.rho * nk.u * nk.u * nk.h / (2.0 * k + 3.0);
                it.w.push(lead * lead);
                it.f.push(0.0);
                it.df.push(0.0);
            } else {
                let s = v / libm::pow(r, 2.0 * k + 3.0);
                it.w.push(s * s);
                it.f.push(r * d * d * r);
                it.df.push(2.0 * d * dv - 2.0 * r * d * d);
            }
        }
        it
    }

    fn with_capacity(p: f64, n: usize) -> Self {
        Self { p, w: Vec::with_capacity(n), f: Vec::with_capacity(n), df: Vec::with_capacity(n) }
    }

    fn push(&mut self, r: f64, w: f64, dw: f64) {
        let k2 = self.p;
        if r == 0.0 {
            self.w.push(w);
            self.f.push(0.0);
            self.df.push(0.0);
        } else {
            let rp = libm::pow(r, k2);
            self.w.push(w);
            self.f.push(rp * w);
            self.df.push(k2 * rp / r * w + rp * dw);
        }
    }

    /// Cumulative integral over the node subset `idx` (which starts at the centre).
    /// Panels touching `r = 0` integrate `r^p` exactly against linear `w`; the rest
    /// use the end-corrected trapezoid `h/2(f₀+f₁) + h²/12(f₀′−f₁′)`.
    fn cumulative(&self, grid: &[f64], idx: &[usize]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; grid.len()];
        let mut acc = 0.0;
        for pair in idx.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let h = grid[b] - grid[a];
            acc += if grid[a] == 0.0 {
                weighted_linear(0.0, grid[b], self.w[a], self.w[b], self.p)
            } else {
                0.5 * h * (self.f[a] + self.f[b]) + h * h / 12.0 * (self.df[a] - self.df[b])
            };
            out[b] = acc;
        }
        out
    }

    fn total(&self, grid: &[f64]) -> Estimate {
        let n = grid.len();
        if n < 2 {
            return Estimate { value: 0.0, error_estimate: 0.0 };
        }
        let fine = self.cumulative(grid, &all_indices(n))[n - 1];
        let coarse = self.cumulative(grid, &coarse_indices(n))[n - 1];
        Estimate { value: fine, error_estimate: (fine - coarse).abs() / 15.0 }
    }
}

/// A quadrature value and its Richardson error estimate (fine vs every-other-node).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_estimate: f64,
}

fn require_closed(profile: &RadialProfile, obs: &ObservableProfile) -> Result<()> {
    if profile.closure == Closure::Open {
        let last = obs.len() - 1;
        if obs.rho[last] > 0.0 {
            return Err(Error::OpenSupport { radius: profile.outer_radius() });
        }
    }
    Ok(())
}

/// `M = ∫₀ᴿ r²ρ dr` (no 4π).
pub fn total_mass(profile: &RadialProfile, obs: &ObservableProfile) -> Result<Estimate> {
    require_closed(profile, obs)?;
    Ok(Integrand::mass(profile, obs).total(&profile.grid))
}

/// Split of `𝓔 = M + ∫r²φ′² dr`; the field part outside the last node is `C²/R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub interior_field: f64,
    pub exterior_tail: f64,
}

pub fn total_energy(profile: &RadialProfile, obs: &ObservableProfile, mass: f64) -> Result<EnergyBreakdown> {
    require_closed(profile, obs)?;
    let interior = Integrand::field(profile, obs).total(&profile.grid).value;
    let r = profile.outer_radius();
    let tail = if r > 0.0 {
        let c = extend_vacuum(profile, r).charge;
        c * c / r
    } else {
        0.0
    };
    Ok(EnergyBreakdown { total: mass + interior + tail, interior_field: interior, exterior_tail: tail })
}

/// `N = ∫ r² n(r) dr` with `n` in the normalization of ρ.
pub fn particle_number(profile: &RadialProfile, obs: &ObservableProfile) -> Result<Estimate> {
    require_closed(profile, obs)?;
    let cfg = profile.numerics.quadrature;
    let angular = crate::special::quadrature::beta_weighted(profile.ansatz.k, -0.5, |_| 1.0, &cfg)?;
    Ok(Integrand::particles(profile, obs, angular).total(&profile.grid))
}

/// `π c_{k,-1/2} g_{k+1/2}(e^{φ₀}) R^{2k+3}/(2k+3)`.
pub fn mass_bound(phi0: f64, radius: f64, ansatz: &PolytropicAnsatz) -> Result<f64> {
    let u0 = libm::exp(phi0);
    if u0 >= ansatz.e0 {
        return Ok(0.0);
    }
    let k = ansatz.k;
    let g = Kernels::new(ansatz).g(k + 0.5, u0)?;
    Ok(PI * beta_unchecked(k, -0.5) * g * libm::pow(radius, 2.0 * k + 3.0) / (2.0 * k + 3.0))
}

/// Nodes with `r > 0` and matter present.
fn interior(profile: &RadialProfile, obs: &ObservableProfile, i: usize) -> bool {
    profile.grid[i] > 0.0 && !obs.kernels[i].is_empty()
}

/// `𝒫′` from the kernel chain rule: `(2k/r)𝒫 − π r^{2k} c_{k,1/2}(2k+3) e^{2φ} φ′ h_{k+1/2}`.
fn pressure_derivative(profile: &RadialProfile, obs: &ObservableProfile, i: usize) -> f64 {
    let k = profile.ansatz.k;
    let (r, d, nk) = (profile.grid[i], profile.dphi[i], &obs.kernels[i]);
    2.0 * k / r * obs.pressure[i]
        - PI * radial_power(r, k) * obs.coefficients.radial * (2.0 * k + 3.0) * nk.u * nk.u * d * nk.h
}

/// Residual of the momentum balance in the TOV form
/// `𝒫′ = −e^{2φ}φ′ρ + (2k/r)𝒫`.
pub fn tov_residual(profile: &RadialProfile, obs: &ObservableProfile) -> Vec<f64> {
    let k = profile.ansatz.k;
    (0..profile.len())
        .map(|i| {
            if !interior(profile, obs, i) {
                return 0.0;
            }
            let (r, d, u) = (profile.grid[i], profile.dphi[i], obs.kernels[i].u);
            pressure_derivative(profile, obs, i) + u * u * d * obs.rho[i] - 2.0 * k / r * obs.pressure[i]
        })
        .collect()
}

/// Residual of `𝒫′ = −φ′(ρ − 𝒫 − 2𝒫_T) − (2/r)(𝒫 − 𝒫_T)`, the balance obtained from
/// the first momentum moment of the stationary Vlasov equation.
pub fn momentum_balance_residual(profile: &RadialProfile, obs: &ObservableProfile) -> Vec<f64> {
    (0..profile.len())
        .map(|i| {
            if !interior(profile, obs, i) {
                return 0.0;
            }
            let (r, d) = (profile.grid[i], profile.dphi[i]);
            let (rho, p, pt) = (obs.rho[i], obs.pressure[i], obs.pressure_t[i]);
            pressure_derivative(profile, obs, i) + d * (rho - p - 2.0 * pt) + 2.0 / r * (p - pt)
        })
        .collect()
}

/// Scale for the momentum-balance residuals: `max e^{2φ}φ′ρ` over interior nodes.
pub fn tov_scale(profile: &RadialProfile, obs: &ObservableProfile) -> f64 {
    (0..profile.len())
        .filter(|&i| interior(profile, obs, i))
        .map(|i| obs.kernels[i].u * obs.kernels[i].u * profile.dphi[i] * obs.rho[i])
        .fold(0.0, f64::max)
}

/// `(1/r²)(r²φ′)′ − (ρ − (2k+3)𝒫)` with `(r²φ′)′` from the field equation.
pub fn field_residual(profile: &RadialProfile, obs: &ObservableProfile) -> Result<Vec<f64>> {
    let k = profile.ansatz.k;
    let src = crate::solver::FieldSource::new(&profile.ansatz, profile.numerics.quadrature);
    (0..profile.len())
        .map(|i| {
            if !interior(profile, obs, i) {
                return Ok(0.0);
            }
            let r = profile.grid[i];
            let dv = src.rhs(r, profile.phi[i])?;
            Ok(dv / (r * r) - (obs.rho[i] - (2.0 * k + 3.0) * obs.pressure[i]))
        })
        .collect()
}

pub fn field_scale(obs: &ObservableProfile) -> f64 {
    obs.rho.iter().copied().fold(0.0, f64::max)
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Largest relative deviation of `𝒫_T` from `(k+1)𝒫` and of the source from
/// `ρ − (2k+3)𝒫`, the latter relative to ρ.
pub fn identity_deviations(profile: &RadialProfile, obs: &ObservableProfile) -> (f64, f64) {
    let k = profile.ansatz.k;
    let mut tangential: f64 = 0.0;
    let mut source: f64 = 0.0;
    for i in 0..obs.len() {
        let p = obs.pressure[i];
        if p > 0.0 {
            tangential = tangential.max(((obs.pressure_t[i] - (k + 1.0) * p) / ((k + 1.0) * p)).abs());
        }
        if obs.rho[i] > 0.0 {
            let q = obs.rho[i] - (2.0 * k + 3.0) * p;
            source = source.max(((obs.source[i] - q) / obs.rho[i]).abs());
        }
    }
    (tangential, source)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SummaryOptions {
    /// Multiply `M`, `𝓔` and `N` by the solid angle 4π.
    pub mass_includes_4pi: bool,
}

/// Everything a run reports besides the arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateSummary {
    pub radius: Option<f64>,
    pub mass: f64,
    pub mass_error_estimate: f64,
    pub energy_total: f64,
    pub field_energy_interior: f64,
    pub field_energy_tail: f64,
    pub particle_number: f64,
    pub phi0: f64,
    pub phi_inf: Option<f64>,
    /// `C = lim r²φ′`.
    pub charge: Option<f64>,
    pub mass_bound: Option<f64>,
    pub finite_radius_detected: bool,
    pub window_ok: bool,
    pub open_support: bool,
    pub center_singular: bool,
    pub mass_includes_4pi: bool,
    pub alpha0_measured: Option<f64>,
    pub alpha0_theory: f64,
    pub beta0_measured: Option<f64>,
    pub beta0_theory: f64,
    pub beta_dyn_measured: Option<f64>,
    pub beta_dyn_theory: f64,
    pub max_tov_residual: f64,
    pub max_momentum_residual: f64,
    pub tov_scale: f64,
    pub max_field_residual: f64,
    pub field_scale: f64,
    pub max_tangential_identity: f64,
    pub max_source_identity: f64,
}

/// Observables, global integrals and residual maxima for one solved profile.
///
/// Open runs report `NaN` for the global integrals.
pub fn summarize(
    profile: &RadialProfile,
    obs: &ObservableProfile,
    diagnostics: Option<&FiniteRadiusDiagnostics>,
    options: SummaryOptions,
) -> Result<SteadyStateSummary> {
    let a = &profile.ansatz;
    let radius = crate::solver::detect_radius(profile, a, &profile.numerics);
    let scale = if options.mass_includes_4pi { 4.0 * PI } else { 1.0 };
    let open = profile.closure == Closure::Open;

    let (mass, energy, number) = match total_mass(profile, obs) {
        Ok(m) => {
            let e = total_energy(profile, obs, m.value)?;
            let n = particle_number(profile, obs)?;
            (m, e, n)
        }
        Err(Error::OpenSupport { .. }) => {
            let nan = Estimate { value: f64::NAN, error_estimate: f64::NAN };
            (nan, EnergyBreakdown { total: f64::NAN, interior_field: f64::NAN, exterior_tail: f64::NAN }, nan)
        }
        Err(e) => return Err(e),
    };

    let (phi_inf, charge, bound) = match radius {
        Some(r) => {
            let ext = extend_vacuum(profile, r);
            let bound = mass_bound(profile.phi0, r, a)? * scale;
            (Some(ext.phi_inf), Some(ext.charge), Some(bound))
        }
        None if !open => (None, None, None),
        None => {
            // no matter reaches max_radius when the source vanishes identically
            if a.is_vacuum_source() {
                (Some(profile.phi0), Some(0.0), None)
            } else {
                (None, None, None)
            }
        }
    };

    let window = check_window(a.mu, a.k, a.e0);
    let tov = tov_residual(profile, obs);
    let mom = momentum_balance_residual(profile, obs);
    let field = field_residual(profile, obs)?;
    let (tangential, source) = identity_deviations(profile, obs);

    let (alpha_m, beta_m, beta_dyn_m) = match diagnostics {
        Some(d) if !d.is_empty() => {
            let last = d.len() - 1;
            (Some(d.alpha[last]), Some(d.beta[last]), Some(d.beta_dyn[last]))
        }
        _ => (None, None, None),
    };

    Ok(SteadyStateSummary {
        radius,
        mass: mass.value * scale,
        mass_error_estimate: mass.error_estimate * scale,
        energy_total: energy.total * scale,
        field_energy_interior: energy.interior_field * scale,
        field_energy_tail: energy.exterior_tail * scale,
        particle_number: number.value * scale,
        phi0: profile.phi0,
        phi_inf,
        charge,
        mass_bound: bound,
        finite_radius_detected: radius.is_some(),
        window_ok: window.ok,
        open_support: open,
        center_singular: obs.center_singular,
        mass_includes_4pi: options.mass_includes_4pi,
        alpha0_measured: alpha_m,
        alpha0_theory: alpha_limit(a.mu, a.k),
        beta0_measured: beta_m,
        beta0_theory: beta_limit(a.mu, a.k, a.e0),
        beta_dyn_measured: beta_dyn_m,
        beta_dyn_theory: beta_dyn_limit(a.mu, a.k),
        max_tov_residual: max_abs(&tov),
        max_momentum_residual: max_abs(&mom),
        tov_scale: tov_scale(profile, obs),
        max_field_residual: max_abs(&field),
        field_scale: field_scale(obs),
        max_tangential_identity: tangential,
        max_source_identity: source,
    })
}
