//! `tdg`: command-line frontend for the target-defense game solver.
//!
//! Exit codes: 0 success, 1 domain error (solver failure, failed checks,
//! unwritable output), 2 usage or parse error.

pub mod scenario;
pub mod svg;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;
use target_defense::barrier_geometry::{sample_pbs_analytic, sample_pbs_mesh, PbsMesh};
use target_defense::export::{mesh_csv, mesh_json, trajectory_csv, trajectory_json};
use target_defense::verify::{run_suite, CheckReport, DEFAULT_SEED, SUITES};
use target_defense::{barrier, simulate, GameState, Scenario, TrajectoryRecord};

pub use scenario::{parse_scenario, ScenarioError, ScenarioFile};

#[derive(Debug, Parser)]
#[command(name = "tdg", version, about = "Target-defense differential game solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the barrier value, region, Apollonius center and radius, and
    /// the projection of the center onto the target.
    Classify {
        #[arg(long, required = true, num_args = 1..)]
        scenario: Vec<PathBuf>,
        /// Also write the reports as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate closed-loop play. With one scenario, `--out` names a `.csv`
    /// or `.json` file; with several it names a directory receiving both.
    Simulate {
        #[arg(long, required = true, num_args = 1..)]
        scenario: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sample the projected barrier surface for the scenario's defender
    /// position. Writes `<out>.csv`, `<out>.json` and, in the plane,
    /// `<out>.svg`.
    Pbs {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite; exit 0 iff every check passes.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed command with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn load(path: &Path) -> Result<(ScenarioFile, Scenario), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn fmt_point(p: &target_defense::Point) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.9}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Runs the CLI on `args` (including the program name), writing reports to
/// `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            let _ = write!(stdout, "{}", out.text);
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Text printed by a command that ran to completion, and its exit code.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Self { text, code: 0 }
    }
}

/// Runs one command.
pub fn execute(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Classify { scenario, out } => classify(&scenario, out.as_deref()).map(Output::from),
        Command::Simulate { scenario, out, seed } => simulate_cmd(&scenario, out.as_deref(), seed).map(Output::from),
        Command::Pbs {
            scenario,
            resolution,
            out,
        } => pbs(&scenario, resolution, &out).map(Output::from),
        Command::Verify { suite, seed, out } => verify(&suite, seed, out.as_deref()),
    }
}

fn classify(paths: &[PathBuf], out: Option<&Path>) -> Result<String, CliError> {
    let mut text = String::new();
    let mut reports = Vec::new();
    for path in paths {
        let (_, sc) = load(path)?;
        let b = barrier(&sc.cfg, &GameState::new(sc.x_p0.clone(), sc.x_e0.clone()), &sc.target).map_err(domain)?;
        let _ = writeln!(text, "scenario: {}", path.display());
        let _ = writeln!(text, "B(x0):    {:.12}", b.value);
        let _ = writeln!(text, "region:   {}", b.region.name());
        let _ = writeln!(text, "alpha:    {}", fmt_point(&b.apollonius.alpha));
        let _ = writeln!(text, "beta:     {:.12}", b.apollonius.beta);
        let _ = writeln!(text, "proj(alpha): {}", fmt_point(&b.projection));
        reports.push(json!({
            "scenario": path.display().to_string(),
            "barrier": b.value,
            "region": b.region.name(),
            "alpha": b.apollonius.alpha.as_slice(),
            "beta": b.apollonius.beta,
            "projection": b.projection.as_slice(),
        }));
    }
    if let Some(out) = out {
        write_file(out, &serde_json::to_string_pretty(&reports).expect("json values serialize"))?;
    }
    Ok(text)
}

fn summary_line(rec: &TrajectoryRecord) -> String {
    let payoff = rec.payoff.map_or("none".to_string(), |p| format!("{p:.9}"));
    let switches: Vec<String> = rec.switch_times.iter().map(|t| format!("{t:.6}")).collect();
    format!(
        "outcome={} t_f={:.6} payoff={} switch_times=[{}] steps={}",
        rec.outcome.name(),
        rec.t_f,
        payoff,
        switches.join(", "),
        rec.rows.len()
    )
}

fn simulate_cmd(paths: &[PathBuf], out: Option<&Path>, seed: Option<u64>) -> Result<String, CliError> {
    let mut scenarios = Vec::with_capacity(paths.len());
    for path in paths {
        let (mut file, mut sc) = load(path)?;
        if let Some(seed) = seed {
            file.seed = seed;
            sc = file
                .to_scenario()
                .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.message)))?;
        }
        scenarios.push(sc);
    }
    let single_format = match (out, paths.len()) {
        (Some(out), 1) => match out.extension().and_then(|e| e.to_str()) {
            Some("csv") => Some(false),
            Some("json") => Some(true),
            _ => return Err(CliError::Usage("--out must end in .csv or .json".into())),
        },
        _ => None,
    };
    if let (Some(dir), true) = (out, paths.len() > 1) {
        fs::create_dir_all(dir).map_err(|e| CliError::Domain(format!("{}: {e}", dir.display())))?;
    }
    let records: Vec<_> = scenarios.par_iter().map(simulate).collect();
    let mut text = String::new();
    for (path, rec) in paths.iter().zip(records) {
        let rec = rec.map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
        if paths.len() > 1 {
            let _ = write!(text, "{}: ", path.display());
        }
        let _ = writeln!(text, "{}", summary_line(&rec));
        match (out, single_format) {
            (Some(out), Some(false)) => write_file(out, &trajectory_csv(&rec))?,
            (Some(out), Some(true)) => write_file(out, &trajectory_json_string(&rec))?,
            (Some(dir), None) => {
                let stem = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
                write_file(&dir.join(format!("{stem}.csv")), &trajectory_csv(&rec))?;
                write_file(&dir.join(format!("{stem}.json")), &trajectory_json_string(&rec))?;
            }
            (None, _) => {}
        }
    }
    Ok(text)
}

fn trajectory_json_string(rec: &TrajectoryRecord) -> String {
    serde_json::to_string_pretty(&trajectory_json(rec)).expect("json values serialize")
}

/// The mesh for a scenario's target and defender: closed-form sampling for
/// singleton, half-space and ball targets, the boundary map otherwise.
pub fn pbs_mesh(file: &ScenarioFile, sc: &Scenario, resolution: usize) -> Result<PbsMesh, CliError> {
    if resolution == 0 {
        return Err(CliError::Usage("--resolution must be at least 1".into()));
    }
    let mesh = if file.target.is_analytic() {
        sample_pbs_analytic(&sc.target, &sc.x_p0, &sc.cfg, resolution)
    } else {
        if !sc.target.has_smooth_closed_boundary() {
            return Err(CliError::Domain(format!(
                "PBS meshing needs a target with a smooth closed boundary; {} is not supported",
                sc.target.kind().name()
            )));
        }
        if !(2..=3).contains(&sc.cfg.dim()) {
            return Err(CliError::Domain(format!(
                "PBS meshing supports dimensions 2 and 3, scenario has {}",
                sc.cfg.dim()
            )));
        }
        sample_pbs_mesh(&sc.target, &sc.x_p0, &sc.cfg, resolution)
    };
    mesh.map_err(domain)
}

fn pbs(path: &Path, resolution: usize, out: &Path) -> Result<String, CliError> {
    if resolution == 0 {
        return Err(CliError::Usage("--resolution must be at least 1".into()));
    }
    let (file, sc) = load(path)?;
    let mesh = pbs_mesh(&file, &sc, resolution)?;
    let max_b = mesh
        .points()
        .map(|s| {
            barrier(&sc.cfg, &GameState::new(sc.x_p0.clone(), s.pbs_point.clone()), &sc.target)
                .map(|b| b.value.abs())
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    let csv_path = out.with_extension("csv");
    let json_path = out.with_extension("json");
    write_file(&csv_path, &mesh_csv(&mesh))?;
    write_file(
        &json_path,
        &serde_json::to_string_pretty(&mesh_json(&mesh)).expect("json values serialize"),
    )?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "vertices={} failures={} max|B|={:.3e}",
        mesh.points().count(),
        mesh.failures.len(),
        max_b
    );
    let _ = writeln!(text, "wrote {}", csv_path.display());
    let _ = writeln!(text, "wrote {}", json_path.display());
    if let Some(svg) = svg::pbs_svg(&mesh, &sc.x_p0) {
        let svg_path = out.with_extension("svg");
        write_file(&svg_path, &svg)?;
        let _ = writeln!(text, "wrote {}", svg_path.display());
    }
    Ok(text)
}

/// Fixed-width table of check reports.
pub fn render_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut text = format!("{:<width$}  {:>7}  {:>10}  {:>9}  result\n", "check", "samples", "max", "tolerance");
    for r in reports {
        let _ = writeln!(
            text,
            "{:<width$}  {:>7}  {:>10.3e}  {:>9.1e}  {}",
            r.name,
            r.samples,
            r.max_residual,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    text
}

fn verify(suite: &str, seed: u64, out: Option<&Path>) -> Result<Output, CliError> {
    let reports = run_suite(suite, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let passed = reports.iter().all(|r| r.passed);
    if let Some(out) = out {
        let report_json = serde_json::to_string_pretty(&json!({
            "suite": suite,
            "seed": seed,
            "passed": passed,
            "checks": reports,
        }))
        .expect("json values serialize");
        write_file(out, &report_json)?;
    }
    Ok(Output {
        text: render_table(&reports),
        code: if passed { 0 } else { 1 },
    })
}
