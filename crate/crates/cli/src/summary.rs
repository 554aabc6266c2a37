//! The summary document written next to each profile.

use nvsteady::observables::SteadyStateSummary;
use nvsteady::{Closure, RadialProfile};
use serde::{Deserialize, Serialize};

use crate::config::{AnsatzSection, SolverSection};
use crate::pipeline::CaseOutcome;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryDoc {
    /// Ansatz of the written profile (rescaled when flattened).
    pub ansatz: AnsatzSection,
    /// Numerics used, with the central value as `phi0`.
    pub solver: SolverSection,
    pub run: RunSection,
    pub summary: SummarySection,
    pub residuals: ResidualSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// `vacuum`, `closed` or `open`.
    pub closure: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_radius: Option<f64>,
    pub seed_interval: f64,
    pub seed_nodes: usize,
    pub accepted_steps: usize,
    pub nodes: usize,
    pub flattened: bool,
    pub phi_shift: f64,
    pub density_factor: f64,
    pub diagnostics_emitted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummarySection {
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(rename = "M")]
    pub mass: f64,
    pub mass_error_estimate: f64,
    pub energy_total: f64,
    pub field_energy_interior: f64,
    pub field_energy_tail: f64,
    pub particle_number: f64,
    pub phi0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_inf: Option<f64>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub charge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_bound: Option<f64>,
    pub finite_radius_detected: bool,
    pub window_ok: bool,
    pub open_support: bool,
    pub center_singular: bool,
    pub mass_includes_4pi: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0_measured: Option<f64>,
    pub alpha0_theory: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0_measured: Option<f64>,
    pub beta0_theory: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
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

impl From<&SteadyStateSummary> for SummarySection {
    fn from(s: &SteadyStateSummary) -> Self {
        Self {
            radius: s.radius,
            mass: s.mass,
            mass_error_estimate: s.mass_error_estimate,
            energy_total: s.energy_total,
            field_energy_interior: s.field_energy_interior,
            field_energy_tail: s.field_energy_tail,
            particle_number: s.particle_number,
            phi0: s.phi0,
            phi_inf: s.phi_inf,
            charge: s.charge,
            mass_bound: s.mass_bound,
            finite_radius_detected: s.finite_radius_detected,
            window_ok: s.window_ok,
            open_support: s.open_support,
            center_singular: s.center_singular,
            mass_includes_4pi: s.mass_includes_4pi,
            alpha0_measured: s.alpha0_measured,
            alpha0_theory: s.alpha0_theory,
            beta0_measured: s.beta0_measured,
            beta0_theory: s.beta0_theory,
            beta_dyn_measured: s.beta_dyn_measured,
            beta_dyn_theory: s.beta_dyn_theory,
            max_tov_residual: s.max_tov_residual,
            max_momentum_residual: s.max_momentum_residual,
            tov_scale: s.tov_scale,
            max_field_residual: s.max_field_residual,
            field_scale: s.field_scale,
            max_tangential_identity: s.max_tangential_identity,
            max_source_identity: s.max_source_identity,
        }
    }
}

/// Residual maxima beyond those of [`SteadyStateSummary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualSection {
    /// Nodes entering the (x, y) residuals; zero when there is no finite support.
    pub xy_nodes: usize,
    pub max_xy_x: f64,
    /// y-equation with the closed-form β.
    pub max_xy_y: f64,
    /// y-equation with the β consistent with the momentum balance.
    pub max_xy_y_dyn: f64,
    pub max_xy_eta: f64,
    pub max_flux_balance: f64,
    pub flux_scale: f64,
}

pub fn closure_name(c: Closure) -> (&'static str, Option<f64>) {
    match c {
        Closure::Vacuum => ("vacuum", None),
        Closure::Closed { radius } => ("closed", Some(radius)),
        Closure::Open => ("open", None),
    }
}

pub fn parse_closure(name: &str, radius: Option<f64>) -> Option<Closure> {
    match (name, radius) {
        ("vacuum", _) => Some(Closure::Vacuum),
        ("closed", Some(r)) => Some(Closure::Closed { radius: r }),
        ("open", _) => Some(Closure::Open),
        _ => None,
    }
}

impl SummaryDoc {
    pub fn new(case: &CaseOutcome, diagnostics_emitted: bool) -> Self {
        let p: &RadialProfile = &case.profile;
        let (closure, closure_radius) = closure_name(p.closure);
        let xy = case.xy.as_ref();
        Self {
            ansatz: AnsatzSection::from_ansatz(&p.ansatz),
            solver: SolverSection::from_numerics(&p.numerics, Some(p.phi0)),
            run: RunSection {
                closure: closure.into(),
                closure_radius,
                seed_interval: p.seed_interval,
                seed_nodes: p.seed_nodes,
                accepted_steps: p.accepted_steps,
                nodes: p.len(),
                flattened: case.flattening.is_some(),
                phi_shift: case.flattening.map_or(0.0, |f| f.phi_shift),
                density_factor: case.flattening.map_or(1.0, |f| f.density_factor),
                diagnostics_emitted,
            },
            summary: (&case.summary).into(),
            residuals: ResidualSection {
                xy_nodes: xy.map_or(0, |x| x.r.len()),
                max_xy_x: xy.map_or(0.0, |x| x.max_local_x()),
                max_xy_y: xy.map_or(0.0, |x| x.max_local_y()),
                max_xy_y_dyn: xy.map_or(0.0, |x| x.max_local_y_dyn()),
                max_xy_eta: xy.map_or(0.0, |x| x.max_local_eta()),
                max_flux_balance: case.max_flux_balance,
                flux_scale: case.flux_scale,
            },
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("summary is always representable")
    }

    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            (line, e.message().trim().to_string())
        })
    }
}
