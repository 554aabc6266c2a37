use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nvsteady::characteristics::OrbitState;
use nvsteady_cli::commands::{limits_report, run_orbit, run_scan, run_solve, run_verify};
use nvsteady_cli::output::{read, write_all};
use nvsteady_cli::{parse_config, CliError, CliResult, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "nvsteady", version, about = "Static spherically symmetric Nordström-Vlasov steady states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one configuration and write profile and summary.
    Solve { config: PathBuf },
    /// Solve every tuple of the [scan] ranges and write the atlas.
    Scan {
        config: PathBuf,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Re-check a stored profile against its summary.
    Verify { profile: PathBuf, summary: PathBuf },
    /// Print the limiting coefficients and the finite-radius window.
    Limits {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long = "E0")]
        e0: f64,
    },
    /// Integrate one orbit in a stored field.
    Orbit {
        profile: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        r0: f64,
        #[arg(long, allow_negative_numbers = true)]
        w0: f64,
        #[arg(long = "F")]
        f: f64,
        #[arg(long)]
        span: f64,
        /// Summary of the profile; defaults to `summary.toml` next to it.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Write the trajectory here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &Path) -> CliResult<(RunConfig, PathBuf)> {
    let text = read(path)?;
    let config = parse_config(&text).map_err(|source| CliError::Config { path: path.into(), source })?;
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Solve { config } => {
            let (config, base) = load_config(&config)?;
            let report = run_solve(&config, &base)?;
            let s = &report.summary.summary;
            match s.radius {
                Some(r) => println!("R = {r:?}  M = {:?}  energy = {:?}", s.mass, s.energy_total),
                None => println!("no finite radius  M = {:?}", s.mass),
            }
            for p in &report.written {
                println!("wrote {}", p.display());
            }
            Ok(0)
        }
        Command::Scan { config, jobs } => {
            let (config, base) = load_config(&config)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let report = run_scan(&config, &base, jobs)?;
            println!("{} of {} tuples solved; wrote {}", report.succeeded, report.rows, report.atlas.display());
            Ok(0)
        }
        Command::Verify { profile, summary } => {
            let report = run_verify(&profile, &summary)?;
            print!("{}", report.render());
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Limits { mu, k, e0 } => {
            if !(mu > -1.0 && k > -0.5 && e0 > 0.0) {
                return Err(CliError::Argument("need mu > -1, k > -1/2 and E0 > 0".into()));
            }
            print!("{}", limits_report(mu, k, e0));
            Ok(0)
        }
        Command::Orbit { profile, r0, w0, f, span, summary, out } => {
            let summary = summary.unwrap_or_else(|| profile.with_file_name("summary.toml"));
            let report = run_orbit(&profile, &summary, OrbitState { r: r0, w: w0, f }, span)?;
            match out {
                Some(path) => write_all(&[(path, report.csv)])?,
                None => print!("{}", report.csv),
            }
            eprintln!("steps = {}  relative energy drift = {:.3e}", report.steps, report.energy_drift);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
