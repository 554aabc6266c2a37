//! One solve, from central value to everything that gets written.

use nvsteady::finite_radius::{build_diagnostics, xy_residuals, FiniteRadiusDiagnostics, XyResiduals};
use nvsteady::observables::{max_abs, summarize, ObservableProfile, SteadyStateSummary, SummaryOptions};
use nvsteady::solver::{asymptotic_flatten, detect_radius, extend_vacuum, flux_balance_residual, integrate_steady_state};
use nvsteady::{PolytropicAnsatz, RadialProfile, Result, SolverNumerics};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CaseOptions {
    pub mass_includes_4pi: bool,
    pub asymptotically_flatten: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flattening {
    pub phi_shift: f64,
    pub density_factor: f64,
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    /// The reported profile, shifted to `φ∞ = 0` when flattening was requested.
    pub profile: RadialProfile,
    pub obs: ObservableProfile,
    pub diagnostics: FiniteRadiusDiagnostics,
    pub summary: SteadyStateSummary,
    pub xy: Option<XyResiduals>,
    pub max_flux_balance: f64,
    /// `max r²|ρ − (2k+3)𝒫|`, the size of `(r²φ′)′`.
    pub flux_scale: f64,
    pub flattening: Option<Flattening>,
}

pub fn solve_case(
    ansatz: &PolytropicAnsatz,
    phi0: f64,
    numerics: &SolverNumerics,
    opts: CaseOptions,
) -> Result<CaseOutcome> {
    let mut profile = integrate_steady_state(phi0, ansatz, numerics)?;
    let mut flattening = None;
    if opts.asymptotically_flatten {
        if let Some(r) = detect_radius(&profile, ansatz, numerics) {
            let phi_inf = extend_vacuum(&profile, r).phi_inf;
            let flat = asymptotic_flatten(&profile, phi_inf);
            flattening = Some(Flattening { phi_shift: phi_inf, density_factor: flat.density_factor });
            profile = flat.profile;
        }
    }
    let obs = ObservableProfile::compute(&profile)?;
    let diagnostics = build_diagnostics(&profile, &obs);
    let summary = summarize(&profile, &obs, Some(&diagnostics), SummaryOptions { mass_includes_4pi: opts.mass_includes_4pi })?;
    let xy = match summary.radius {
        Some(r) if !diagnostics.is_empty() => Some(xy_residuals(&diagnostics, &profile, r)),
        _ => None,
    };
    let max_flux_balance = max_abs(&flux_balance_residual(&profile)?);
    let flux_scale = flux_scale(&profile, &obs);
    Ok(CaseOutcome { profile, obs, diagnostics, summary, xy, max_flux_balance, flux_scale, flattening })
}

pub fn flux_scale(profile: &RadialProfile, obs: &ObservableProfile) -> f64 {
    profile.grid.iter().zip(&obs.source).map(|(r, s)| (r * r * s).abs()).fold(0.0, f64::max)
}
