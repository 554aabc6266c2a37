//! The subcommands, independent of argument parsing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use nvsteady::characteristics::{integrate_orbit, FieldInterpolant, OrbitConfig, OrbitState};
use nvsteady::finite_radius::{
    alpha_limit, beta_dyn_limit, beta_limit, build_diagnostics, check_window, xy_residuals,
};
use nvsteady::observables::{
    max_abs, momentum_balance_residual, summarize, tov_residual, tov_scale, ObservableProfile, SummaryOptions,
};
use nvsteady::solver::{flux_balance_residual, FieldSource};
use nvsteady::RadialProfile;

use crate::config::{RunConfig, Tuple};
use crate::error::{CliError, CliResult};
use crate::orbits::{emit_orbits, write_trajectory, HEADER as ORBIT_HEADER};
use crate::output::{read, write_all};
use crate::pipeline::{flux_scale, solve_case, CaseOptions, CaseOutcome};
use crate::profile_csv::{read_profile, write_profile, ProfileTable};
use crate::summary::{parse_closure, SummaryDoc};

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn case_options(config: &RunConfig) -> CaseOptions {
    CaseOptions {
        mass_includes_4pi: config.output.mass_includes_4pi,
        asymptotically_flatten: config.output.asymptotically_flatten,
    }
}

#[derive(Debug)]
pub struct SolveReport {
    pub summary: SummaryDoc,
    pub written: Vec<PathBuf>,
}

/// Solve the configured point and write profile, summary and, if requested, orbits.
/// Relative output paths are taken from `base`.
pub fn run_solve(config: &RunConfig, base: &Path) -> CliResult<SolveReport> {
    let t = config.base_tuple()?;
    let ansatz = config.ansatz()?;
    let case = solve_case(&ansatz, t.central.phi0(t.e0), &config.numerics(), case_options(config))?;
    let out = &config.output;
    let diag = out.emit_diagnostics.then_some(&case.diagnostics);
    let summary = SummaryDoc::new(&case, out.emit_diagnostics);
    let mut files = vec![
        (resolve(base, &out.profile), write_profile(&case.profile, &case.obs, diag)),
        (resolve(base, &out.summary), summary.to_text()),
    ];
    if out.emit_orbits > 0 {
        if let Some(csv) = emit_orbits(&case.profile, case.summary.radius, out.emit_orbits, out.orbit_seed, out.orbit_span)? {
            files.push((resolve(base, &out.orbits), csv));
        }
    }
    write_all(&files)?;
    Ok(SolveReport { summary, written: files.into_iter().map(|(p, _)| p).collect() })
}

pub const ATLAS_HEADER: &str = "k,mu,E0,phi0,R,M,energy,N,phi_inf,alpha0_measured,alpha0_theory,beta0_measured,\
beta0_theory,beta_dyn_measured,beta_dyn_theory,window_ok,finite_radius_detected,max_tov_residual,\
max_momentum_residual,max_field_residual,max_xy_x,max_xy_y,max_xy_y_dyn,status";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn atlas_row(config: &RunConfig, t: &Tuple) -> String {
    let phi0 = t.central.phi0(t.e0);
    let mut row = format!("{:?},{:?},{:?},{phi0:?},", t.k, t.mu, t.e0);
    let solved = config
        .ansatz_at(t)
        .and_then(|a| solve_case(&a, phi0, &config.numerics(), case_options(config)));
    match solved {
        Ok(c) => {
            let s = &c.summary;
            let xy = c.xy.as_ref();
            write!(
                row,
                "{},{:?},{:?},{:?},{},{},{:?},{},{:?},{},{:?},{},{},{:?},{:?},{:?},{},{},{},ok",
                opt(s.radius),
                s.mass,
                s.energy_total,
                s.particle_number,
                opt(s.phi_inf),
                opt(s.alpha0_measured),
                s.alpha0_theory,
                opt(s.beta0_measured),
                s.beta0_theory,
                opt(s.beta_dyn_measured),
                s.beta_dyn_theory,
                s.window_ok,
                s.finite_radius_detected,
                s.max_tov_residual,
                s.max_momentum_residual,
                s.max_field_residual,
                opt(xy.map(|x| x.max_local_x())),
                opt(xy.map(|x| x.max_local_y())),
                opt(xy.map(|x| x.max_local_y_dyn())),
            )
            .unwrap();
        }
        Err(e) => {
            let window = check_window(t.mu, t.k, t.e0).ok;
            let msg: String = e.to_string().chars().map(|c| if c == ',' || c == '\n' { ';' } else { c }).collect();
            row.push_str(&",".repeat(11));
            write!(row, "{window},false,,,,,,,error: {msg}").unwrap();
        }
    }
    row
}

#[derive(Debug)]
pub struct ScanReport {
    pub rows: usize,
    pub succeeded: usize,
    pub atlas: PathBuf,
}

/// Solve every scan tuple on `jobs` threads and write the atlas in tuple order.
pub fn run_scan(config: &RunConfig, base: &Path, jobs: usize) -> CliResult<ScanReport> {
    if !config.is_scan() {
        return Err(CliError::Argument("scan needs at least one range in [scan]".into()));
    }
    let tuples = config.scan_tuples()?;
    let next = AtomicUsize::new(0);
    let jobs = jobs.clamp(1, tuples.len().max(1));
    let mut rows: Vec<(usize, String)> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(t) = tuples.get(i) else { break };
                        done.push((i, atlas_row(config, t)));
                    }
                    done
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().expect("scan worker panicked")).collect()
    });
    rows.sort_by_key(|(i, _)| *i);
    let succeeded = rows.iter().filter(|(_, r)| r.ends_with(",ok")).count();
    let mut text = String::from(ATLAS_HEADER);
    text.push('\n');
    for (_, r) in &rows {
        text.push_str(r);
        text.push('\n');
    }
    let atlas = resolve(base, &config.output.atlas);
    write_all(&[(atlas.clone(), text)])?;
    if succeeded == 0 {
        return Err(CliError::ScanFailed(rows.len()));
    }
    Ok(ScanReport { rows: rows.len(), succeeded, atlas })
}

/// Profile and summary read back from disk.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub profile: RadialProfile,
    pub table: ProfileTable,
    pub summary: SummaryDoc,
}

pub fn load_run(profile_path: &Path, summary_path: &Path) -> CliResult<StoredRun> {
    let malformed = |path: &Path, (line, message): (usize, String)| CliError::Malformed { path: path.into(), line, message };
    let summary = SummaryDoc::parse(&read(summary_path)?).map_err(|e| malformed(summary_path, e))?;
    let table = read_profile(&read(profile_path)?).map_err(|e| malformed(profile_path, e))?;
    let bad_summary = |m: String| malformed(summary_path, (1, m));
    let ansatz = summary.ansatz.build().map_err(|e| bad_summary(e.to_string()))?;
    let numerics = summary.solver.numerics();
    numerics.validate().map_err(|e| bad_summary(e.to_string()))?;
    let closure = parse_closure(&summary.run.closure, summary.run.closure_radius)
        .ok_or_else(|| bad_summary(format!("unknown closure `{}`", summary.run.closure)))?;
    let phi0 = summary.solver.phi0.ok_or_else(|| bad_summary("missing solver.phi0".into()))?;
    if table.len() != summary.run.nodes {
        return Err(malformed(
            profile_path,
            (table.len() + 1, format!("{} rows but the summary records {} nodes", table.len(), summary.run.nodes)),
        ));
    }
    let profile = RadialProfile {
        flux: table.r.iter().zip(&table.dphi).map(|(r, d)| r * r * d).collect(),
        grid: table.r.clone(),
        phi: table.phi.clone(),
        dphi: table.dphi.clone(),
        phi0,
        ansatz,
        numerics,
        seed_interval: summary.run.seed_interval,
        seed_nodes: summary.run.seed_nodes,
        closure,
        final_step: None,
        accepted_steps: summary.run.accepted_steps,
    };
    Ok(StoredRun { profile, table, summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    /// Informational checks are reported but never fail the run.
    pub gated: bool,
}

impl Check {
    pub fn passed(&self) -> bool {
        !self.gated || self.measured <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match (c.gated, c.passed()) {
                (false, _) => "info",
                (true, true) => "pass",
                (true, false) => "FAIL",
            };
            writeln!(out, "{status:4} {:<24} {:.3e} (limit {:.0e})", c.name, c.measured, c.tolerance).unwrap();
        }
        out
    }
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Re-evaluate every invariant on a stored profile.
pub fn run_verify(profile_path: &Path, summary_path: &Path) -> CliResult<VerifyReport> {
    let run = load_run(profile_path, summary_path)?;
    Ok(verify_run(&run)?)
}

pub fn verify_run(run: &StoredRun) -> nvsteady::Result<VerifyReport> {
    let (p, t, doc) = (&run.profile, &run.table, &run.summary);
    let k = p.ansatz.k;
    let n = p.len();
    let mut checks = Vec::new();
    let mut push = |name, measured: f64, tolerance, gated| checks.push(Check { name, measured, tolerance, gated });

    let violations = (1..n)
        .filter(|&i| !(p.grid[i] > p.grid[i - 1]) || !(p.phi[i] >= p.phi[i - 1]) || !(p.dphi[i] >= 0.0))
        .count()
        + usize::from(!(p.grid[0] == 0.0 && p.dphi[0] == 0.0));
    push("monotone", violations as f64, 0.0, true);

    let rho_max = t.rho.iter().copied().fold(0.0, f64::max);
    let (mut tangential, mut identity, mut field) = (0.0f64, 0.0f64, 0.0f64);
    let src = FieldSource::new(&p.ansatz, p.numerics.quadrature);
    for i in 0..n {
        if t.pressure[i] > 0.0 {
            tangential = tangential.max(rel_dev(t.pressure_t[i], (k + 1.0) * t.pressure[i]));
        }
        let q = t.rho[i] - (2.0 * k + 3.0) * t.pressure[i];
        if t.rho[i] > 0.0 {
            identity = identity.max(((t.source[i] - q) / t.rho[i]).abs());
        }
        let r = p.grid[i];
        if r > 0.0 {
            let dv = src.rhs(r, p.phi[i])?;
            field = field.max((dv / (r * r) - q).abs());
        }
    }
    push("tangential_identity", tangential, 1e-10, true);
    push("source_identity", identity, 1e-9, true);
    push("field_residual", relative(field, rho_max), 1e-8, true);

    let obs = ObservableProfile::compute(p)?;
    let columns = [(&t.rho, &obs.rho), (&t.pressure, &obs.pressure), (&t.pressure_t, &obs.pressure_t), (&t.source, &obs.source)];
    let reproduce = columns
        .iter()
        .map(|(stored, fresh)| {
            let scale = fresh.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let d = stored.iter().zip(fresh.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            relative(d, scale)
        })
        .fold(0.0, f64::max);
    push("observables_reproduce", reproduce, 1e-12, true);

    let scale = tov_scale(p, &obs);
    push("momentum_balance", relative(max_abs(&momentum_balance_residual(p, &obs)), scale), 1e-8, true);
    push("tov_form", relative(max_abs(&tov_residual(p, &obs)), scale), 1e-6, false);

    let fb = max_abs(&flux_balance_residual(p)?);
    push("flux_balance", relative(fb, flux_scale(p, &obs)), 1e-6, true);

    let mass_dev = (1..n)
        .filter(|&i| p.flux[i] > 0.0)
        .map(|i| rel_dev(t.mass_cum[i], p.flux[i]))
        .fold(0.0, f64::max);
    push("mass_profile", mass_dev, 1e-6, true);

    let diag = build_diagnostics(p, &obs);
    let fresh = summarize(p, &obs, Some(&diag), SummaryOptions { mass_includes_4pi: doc.summary.mass_includes_4pi })?;
    let mass_ok = if doc.summary.mass.is_nan() && fresh.mass.is_nan() { 0.0 } else { rel_dev(doc.summary.mass, fresh.mass) };
    push("summary_mass", mass_ok, 1e-9, true);
    if let (Some(bound), false) = (doc.summary.mass_bound, doc.summary.mass.is_nan()) {
        push("mass_bound", (doc.summary.mass - bound).max(0.0), 0.0, true);
    }

    if doc.run.diagnostics_emitted {
        let mut dev = 0.0f64;
        let mut seen = 0usize;
        for (j, &i) in diag.node_index.iter().enumerate() {
            let fresh = [diag.eta[j], diag.x[j], diag.y[j], diag.alpha[j], diag.beta[j]];
            match t.diagnostics[i] {
                Some(stored) => {
                    seen += 1;
                    for (a, b) in stored.iter().zip(fresh) {
                        dev = dev.max(rel_dev(*a, b));
                    }
                }
                None => dev = f64::INFINITY,
            }
        }
        let extra = t.diagnostics.iter().filter(|d| d.is_some()).count() - seen;
        push("diagnostics_reproduce", if extra > 0 { f64::INFINITY } else { dev }, 1e-9, true);
    }

    if let Some(radius) = doc.summary.radius.filter(|&r| r > 0.0 && !diag.is_empty()) {
        let xy = xy_residuals(&diag, p, radius);
        push("xy_x", xy.max_local_x(), 1e-4, true);
        push("xy_y_dyn", xy.max_local_y_dyn(), 1e-4, true);
        push("xy_eta", xy.max_local_eta(), 1e-4, true);
        push("xy_y_closed_form", xy.max_local_y(), 1e-4, false);
    }
    Ok(VerifyReport { checks })
}

/// `key = value` lines for the finite-radius limits at `(μ, k, E₀)`.
pub fn limits_report(mu: f64, k: f64, e0: f64) -> String {
    let w = check_window(mu, k, e0);
    format!(
        "alpha_limit = {:?}\nbeta_limit = {:?}\nbeta_dyn_limit = {:?}\nwindow_lower = {:?}\nwindow_upper = {:?}\nE0_squared = {:?}\nwindow_ok = {}\n",
        alpha_limit(mu, k),
        beta_limit(mu, k, e0),
        beta_dyn_limit(mu, k),
        w.lower,
        w.upper,
        e0 * e0,
        w.ok
    )
}

#[derive(Debug)]
pub struct OrbitReport {
    pub csv: String,
    pub energy_drift: f64,
    pub steps: usize,
}

/// Integrate one characteristic in a stored field.
pub fn run_orbit(profile_path: &Path, summary_path: &Path, initial: OrbitState, span: f64) -> CliResult<OrbitReport> {
    let run = load_run(profile_path, summary_path)?;
    let field = FieldInterpolant::new(&run.profile);
    let traj = integrate_orbit(&field, initial, span, &OrbitConfig::default())?;
    let mut csv = String::from(ORBIT_HEADER);
    csv.push('\n');
    write_trajectory(&mut csv, 0, &traj, &run.profile);
    Ok(OrbitReport { energy_drift: traj.relative_energy_drift(), steps: traj.len() - 1, csv })
}

/// Outcome of [`solve_case`] for the configured point, without writing anything.
pub fn solve_in_memory(config: &RunConfig) -> CliResult<CaseOutcome> {
    let t = config.base_tuple()?;
    Ok(solve_case(&config.ansatz()?, t.central.phi0(t.e0), &config.numerics(), case_options(config))?)
}
