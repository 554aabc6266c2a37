//! Run configuration: a TOML document with `[ansatz]`, `[solver]`, `[output]` and `[scan]`.

use std::fmt;
use std::path::PathBuf;

use nvsteady::finite_radius::check_window;
use nvsteady::ode::StepController;
use nvsteady::special::quadrature::QuadratureConfig;
use nvsteady::{PolytropicAnsatz, PsiTable, SolverNumerics};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    EnergyWeighted,
    PlainPowerLaw,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSection {
    pub variant: Variant,
    pub k: f64,
    pub mu: f64,
    /// Cut-off energy; taken from the last table energy for `tabulated`.
    #[serde(rename = "E0", default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_energies: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_values: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

impl AnsatzSection {
    pub fn build(&self) -> nvsteady::Result<PolytropicAnsatz> {
        let missing_e0 = nvsteady::Error::InvalidAnsatz("E0 is required for this variant");
        match self.variant {
            Variant::EnergyWeighted => {
                PolytropicAnsatz::energy_weighted(self.k, self.mu, self.e0.ok_or(missing_e0)?, self.amplitude)
            }
            Variant::PlainPowerLaw => {
                PolytropicAnsatz::plain_power_law(self.k, self.mu, self.e0.ok_or(missing_e0)?, self.amplitude)
            }
            Variant::Tabulated => {
                let (Some(e), Some(v)) = (&self.table_energies, &self.table_values) else {
                    return Err(nvsteady::Error::InvalidAnsatz("tabulated variant needs table_energies and table_values"));
                };
                let table = PsiTable::new(e.clone(), v.clone())?;
                PolytropicAnsatz::tabulated(self.k, self.mu, table, self.amplitude)
            }
        }
    }

    /// Section describing an already built ansatz.
    pub fn from_ansatz(a: &PolytropicAnsatz) -> Self {
        let (variant, table_energies, table_values) = match &a.variant {
            nvsteady::PsiVariant::EnergyWeighted => (Variant::EnergyWeighted, None, None),
            nvsteady::PsiVariant::PlainPowerLaw => (Variant::PlainPowerLaw, None, None),
            nvsteady::PsiVariant::Tabulated(t) => {
                (Variant::Tabulated, Some(t.energies().to_vec()), Some(t.values().to_vec()))
            }
        };
        let e0 = if table_energies.is_some() { None } else { Some(a.e0) };
        Self { variant, k: a.k, mu: a.mu, e0, amplitude: a.amplitude, table_energies, table_values }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Controller {
    Integral,
    Pi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Central value φ₀. Exactly one of `phi0` and `central_fraction` (e^{φ₀}/E₀) is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_interval: Option<f64>,
    pub picard_tolerance: f64,
    pub ode_abs_tol: f64,
    pub ode_rel_tol: f64,
    pub max_radius: f64,
    pub radius_tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    pub controller: Controller,
    pub quadrature_abs_tol: f64,
    pub quadrature_rel_tol: f64,
    pub quadrature_max_panels: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self::from_numerics(&SolverNumerics::default(), None)
    }
}

// Field-wise defaults so that a partial [solver] section keeps the remaining defaults.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialSolver {
    phi0: Option<f64>,
    central_fraction: Option<f64>,
    seed_interval: Option<f64>,
    picard_tolerance: Option<f64>,
    ode_abs_tol: Option<f64>,
    ode_rel_tol: Option<f64>,
    max_radius: Option<f64>,
    radius_tolerance: Option<f64>,
    max_step: Option<f64>,
    controller: Option<Controller>,
    quadrature_abs_tol: Option<f64>,
    quadrature_rel_tol: Option<f64>,
    quadrature_max_panels: Option<usize>,
}

fn solver_with_defaults<'de, D: serde::Deserializer<'de>>(d: D) -> Result<SolverSection, D::Error> {
    let p = PartialSolver::deserialize(d)?;
    let def = SolverSection::default();
    Ok(SolverSection {
        phi0: p.phi0,
        central_fraction: p.central_fraction,
        seed_interval: p.seed_interval,
        picard_tolerance: p.picard_tolerance.unwrap_or(def.picard_tolerance),
        ode_abs_tol: p.ode_abs_tol.unwrap_or(def.ode_abs_tol),
        ode_rel_tol: p.ode_rel_tol.unwrap_or(def.ode_rel_tol),
        max_radius: p.max_radius.unwrap_or(def.max_radius),
        radius_tolerance: p.radius_tolerance.unwrap_or(def.radius_tolerance),
        max_step: p.max_step,
        controller: p.controller.unwrap_or(def.controller),
        quadrature_abs_tol: p.quadrature_abs_tol.unwrap_or(def.quadrature_abs_tol),
        quadrature_rel_tol: p.quadrature_rel_tol.unwrap_or(def.quadrature_rel_tol),
        quadrature_max_panels: p.quadrature_max_panels.unwrap_or(def.quadrature_max_panels),
    })
}

impl SolverSection {
    pub fn from_numerics(n: &SolverNumerics, phi0: Option<f64>) -> Self {
        Self {
            phi0,
            central_fraction: None,
            seed_interval: n.seed_interval,
            picard_tolerance: n.picard_tolerance,
            ode_abs_tol: n.ode_abs_tol,
            ode_rel_tol: n.ode_rel_tol,
            max_radius: n.max_radius,
            radius_tolerance: n.radius_tolerance,
            max_step: n.max_step,
            controller: match n.controller {
                StepController::Integral => Controller::Integral,
                StepController::ProportionalIntegral => Controller::Pi,
            },
            quadrature_abs_tol: n.quadrature.abs_tol,
            quadrature_rel_tol: n.quadrature.rel_tol,
            quadrature_max_panels: n.quadrature.max_panels,
        }
    }

    pub fn numerics(&self) -> SolverNumerics {
        SolverNumerics {
            seed_interval: self.seed_interval,
            picard_tolerance: self.picard_tolerance,
            ode_abs_tol: self.ode_abs_tol,
            ode_rel_tol: self.ode_rel_tol,
            max_radius: self.max_radius,
            radius_tolerance: self.radius_tolerance,
            max_step: self.max_step,
            controller: match self.controller {
                Controller::Integral => StepController::Integral,
                Controller::Pi => StepController::ProportionalIntegral,
            },
            quadrature: QuadratureConfig {
                abs_tol: self.quadrature_abs_tol,
                rel_tol: self.quadrature_rel_tol,
                max_panels: self.quadrature_max_panels,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_profile")]
    pub profile: PathBuf,
    #[serde(default = "default_summary")]
    pub summary: PathBuf,
    #[serde(default = "default_atlas")]
    pub atlas: PathBuf,
    #[serde(default = "default_orbits")]
    pub orbits: PathBuf,
    #[serde(default)]
    pub mass_includes_4pi: bool,
    #[serde(default)]
    pub asymptotically_flatten: bool,
    #[serde(default = "yes")]
    pub emit_diagnostics: bool,
    /// Number of random bound orbits written to `orbits`.
    #[serde(default)]
    pub emit_orbits: usize,
    #[serde(default)]
    pub orbit_seed: u32,
    #[serde(default = "default_span")]
    pub orbit_span: f64,
}

fn default_profile() -> PathBuf {
    "profile.csv".into()
}
fn default_summary() -> PathBuf {
    "summary.toml".into()
}
fn default_atlas() -> PathBuf {
    "atlas.csv".into()
}
fn default_orbits() -> PathBuf {
    "orbits.csv".into()
}
fn yes() -> bool {
    true
}
fn default_span() -> f64 {
    50.0
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            profile: default_profile(),
            summary: default_summary(),
            atlas: default_atlas(),
            orbits: default_orbits(),
            mass_includes_4pi: false,
            asymptotically_flatten: false,
            emit_diagnostics: true,
            emit_orbits: 0,
            orbit_seed: 0,
            orbit_span: default_span(),
        }
    }
}

/// A scan axis: an explicit list or `{ linspace = [start, stop, count] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    List(Vec<f64>),
    Linspace { linspace: (f64, f64, usize) },
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Range::List(v) => v.clone(),
            Range::Linspace { linspace: (a, b, n) } => match n {
                0 => Vec::new(),
                1 => vec![*a],
                _ => (0..*n).map(|i| a + (b - a) * i as f64 / (*n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_fraction: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Range>,
    #[serde(rename = "E0", default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<Range>,
}

impl ScanSection {
    pub fn is_empty(&self) -> bool {
        self.axes().iter().all(|(_, r)| r.is_none())
    }

    fn axes(&self) -> [(&'static str, &Option<Range>); 5] {
        [
            ("phi0", &self.phi0),
            ("central_fraction", &self.central_fraction),
            ("k", &self.k),
            ("mu", &self.mu),
            ("E0", &self.e0),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ansatz: AnsatzSection,
    #[serde(default, deserialize_with = "solver_with_defaults")]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "ScanSection::is_empty")]
    pub scan: ScanSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// One point of parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuple {
    pub k: f64,
    pub mu: f64,
    pub e0: f64,
    pub central: Central,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Central {
    Phi0(f64),
    Fraction(f64),
}

impl Central {
    pub fn phi0(self, e0: f64) -> f64 {
        match self {
            Central::Phi0(p) => p,
            Central::Fraction(c) => (c * e0).ln(),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Central::Phi0(v) | Central::Fraction(v) => v,
        }
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| line_at(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    config.validate().map_err(|(section, key, message)| ConfigError { line: find_key(text, section, key), message })?;
    Ok(config)
}

/// Serialize to a document that parses back to the same configuration.
pub fn serialize_config(config: &RunConfig) -> String {
    toml::to_string(config).expect("configuration is always representable")
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]`, if present.
fn find_key(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = name.trim().to_string();
        } else if current == section {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

type Violation = (&'static str, &'static str, String);

impl RunConfig {
    fn validate(&self) -> Result<(), Violation> {
        let a = &self.ansatz;
        a.build().map_err(|e| ("ansatz", ansatz_key(&e, a), e.to_string()))?;
        self.solver.numerics().validate().map_err(|e| ("solver", "", e.to_string()))?;
        let s = &self.solver;
        match (s.phi0, s.central_fraction) {
            (Some(_), Some(_)) => return Err(("solver", "phi0", "give only one of phi0 and central_fraction".into())),
            (None, None) if self.scan.phi0.is_none() && self.scan.central_fraction.is_none() => {
                return Err(("solver", "", "one of phi0 and central_fraction is required".into()))
            }
            _ => {}
        }
        if let Some(c) = s.central_fraction {
            if !(c > 0.0 && c.is_finite()) {
                return Err(("solver", "central_fraction", format!("central_fraction must be positive (got {c})")));
            }
        }
        if let Some(p) = s.phi0 {
            if !p.is_finite() {
                return Err(("solver", "phi0", format!("phi0 must be finite (got {p})")));
            }
        }
        if !(self.output.orbit_span > 0.0 && self.output.orbit_span.is_finite()) {
            return Err(("output", "orbit_span", "orbit_span must be positive".into()));
        }
        let sc = &self.scan;
        if sc.phi0.is_some() && sc.central_fraction.is_some() {
            return Err(("scan", "phi0", "scan over only one of phi0 and central_fraction".into()));
        }
        if sc.e0.is_some() && a.variant == Variant::Tabulated {
            return Err(("scan", "E0", "E0 is fixed by the table for the tabulated variant".into()));
        }
        for (key, range) in sc.axes() {
            if let Some(r) = range {
                let v = r.values();
                if v.is_empty() {
                    return Err(("scan", key, format!("scan range for {key} is empty")));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(("scan", key, format!("scan range for {key} has a non-finite value")));
                }
            }
        }
        for k in sc.k.as_ref().map(Range::values).unwrap_or_default() {
            if !(k > -0.5) {
                return Err(("scan", "k", format!("k must exceed -1/2 (got {k})")));
            }
        }
        for mu in sc.mu.as_ref().map(Range::values).unwrap_or_default() {
            if !(mu > -1.0) {
                return Err(("scan", "mu", format!("mu must exceed -1 (got {mu})")));
            }
        }
        for e0 in sc.e0.as_ref().map(Range::values).unwrap_or_default() {
            if !(e0 > 0.0) {
                return Err(("scan", "E0", format!("E0 must be positive (got {e0})")));
            }
        }
        for c in sc.central_fraction.as_ref().map(Range::values).unwrap_or_default() {
            if !(c > 0.0) {
                return Err(("scan", "central_fraction", format!("central_fraction must be positive (got {c})")));
            }
        }
        Ok(())
    }

    pub fn ansatz(&self) -> nvsteady::Result<PolytropicAnsatz> {
        self.ansatz.build()
    }

    pub fn numerics(&self) -> SolverNumerics {
        self.solver.numerics()
    }

    pub fn is_scan(&self) -> bool {
        !self.scan.is_empty()
    }

    /// The single-run parameter point.
    pub fn base_tuple(&self) -> nvsteady::Result<Tuple> {
        let a = self.ansatz()?;
        let central = match (self.solver.phi0, self.solver.central_fraction) {
            (Some(p), _) => Central::Phi0(p),
            (None, Some(c)) => Central::Fraction(c),
            (None, None) => return Err(nvsteady::Error::InvalidNumerics("one of phi0 and central_fraction is required")),
        };
        Ok(Tuple { k: a.k, mu: a.mu, e0: a.e0, central })
    }

    /// Every scan tuple, sorted lexicographically by `(k, mu, E0, central value)`.
    pub fn scan_tuples(&self) -> nvsteady::Result<Vec<Tuple>> {
        let a = self.ansatz()?;
        let sc = &self.scan;
        let axis = |r: &Option<Range>, base: f64| r.as_ref().map_or_else(|| vec![base], Range::values);
        let centrals: Vec<Central> = if let Some(r) = &sc.phi0 {
            r.values().into_iter().map(Central::Phi0).collect()
        } else if let Some(r) = &sc.central_fraction {
            r.values().into_iter().map(Central::Fraction).collect()
        } else {
            vec![self.base_tuple()?.central]
        };
        let mut out = Vec::new();
        for &k in &axis(&sc.k, a.k) {
            for &mu in &axis(&sc.mu, a.mu) {
                for &e0 in &axis(&sc.e0, a.e0) {
                    for &central in &centrals {
                        out.push(Tuple { k, mu, e0, central });
                    }
                }
            }
        }
        out.sort_by(|x, y| {
            x.k.total_cmp(&y.k)
                .then(x.mu.total_cmp(&y.mu))
                .then(x.e0.total_cmp(&y.e0))
                .then(x.central.value().total_cmp(&y.central.value()))
        });
        out.dedup();
        Ok(out)
    }

    /// The ansatz at a scan tuple.
    pub fn ansatz_at(&self, t: &Tuple) -> nvsteady::Result<PolytropicAnsatz> {
        let section = AnsatzSection {
            k: t.k,
            mu: t.mu,
            e0: if self.ansatz.variant == Variant::Tabulated { None } else { Some(t.e0) },
            ..self.ansatz.clone()
        };
        section.build()
    }

    /// Non-fatal remarks, such as a cut-off outside the finite-radius window.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Ok(a) = self.ansatz() {
            let w = check_window(a.mu, a.k, a.e0);
            if !w.ok {
                out.push(format!(
                    "E0^2 = {} outside the finite-radius window ({}, {}) for mu = {}, k = {}; a finite radius is not guaranteed",
                    a.e0 * a.e0,
                    w.lower,
                    w.upper,
                    a.mu,
                    a.k
                ));
            }
        }
        out
    }
}

fn ansatz_key(e: &nvsteady::Error, a: &AnsatzSection) -> &'static str {
    let msg = e.to_string();
    if msg.contains(" k ") || msg.contains("k must") {
        "k"
    } else if msg.contains("mu") {
        "mu"
    } else if msg.contains("E0") {
        "E0"
    } else if msg.contains("amplitude") {
        "amplitude"
    } else if a.variant == Variant::Tabulated {
        "table_energies"
    } else {
        "variant"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[ansatz]\nvariant = \"energy_weighted\"\nk = 0.0\nmu = 0.5\nE0 = 0.9486832980505138\n\n[solver]\ncentral_fraction = 0.5\n";

    #[test]
    fn defaults_fill_missing_numerics() {
        let c = parse_config(BASE).unwrap();
        assert_eq!(c.numerics(), SolverNumerics::default());
        assert!(!c.is_scan());
        assert_eq!(c.output, OutputSection::default());
    }

    #[test]
    fn empty_scan_section_is_single_run() {
        let c = parse_config(&format!("{BASE}\n[scan]\n")).unwrap();
        assert!(!c.is_scan());
    }

    #[test]
    fn small_k_is_rejected_with_its_line() {
        let err = parse_config(&BASE.replace("k = 0.0", "k = -0.6")).unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains("k must exceed -1/2"), "{}", err.message);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = parse_config(&format!("{BASE}tolerance = 3\n")).unwrap_err();
        assert!(err.message.contains("unknown field"), "{}", err.message);
        assert_eq!(err.line, Some(9));
    }

    #[test]
    fn window_violation_is_only_a_warning() {
        let c = parse_config(&BASE.replace("0.9486832980505138", "0.5")).unwrap();
        let w = c.warnings();
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("outside the finite-radius window"));
        assert!(parse_config(BASE).unwrap().warnings().is_empty());
    }

    #[test]
    fn linspace_and_lists() {
        assert_eq!(Range::Linspace { linspace: (0.0, 1.0, 3) }.values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Range::Linspace { linspace: (2.0, 5.0, 1) }.values(), vec![2.0]);
        let c = parse_config(&format!("{BASE}\n[scan]\nmu = [1, 0.5]\nE0 = {{ linspace = [0.9, 1.0, 2] }}\n")).unwrap();
        let t = c.scan_tuples().unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!((t[0].mu, t[0].e0), (0.5, 0.9));
        assert_eq!((t[3].mu, t[3].e0), (1.0, 1.0));
    }

    #[test]
    fn empty_range_is_rejected() {
        let err = parse_config(&format!("{BASE}\n[scan]\nk = []\n")).unwrap_err();
        assert!(err.message.contains("empty"));
        assert_eq!(err.line, Some(11));
    }
}
