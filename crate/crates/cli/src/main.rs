//! `kgm` — command-line front end for the standing-wave toolkit.
//!
//! Subcommands:
//!
//! - `admissible`      check the existence conditions for a parameter set
//! - `threshold-table` tabulate the admissibility threshold α₀(s, Ω)
//! - `solve`           run the mountain-pass solver and write the profile
//! - `spectrum`        lowest eigenvalues of the linearized operator
//! - `verify`          run the built-in verification battery
//!
//! All reports are deterministic: identical inputs produce byte-identical
//! stdout and output files. Timing goes to stderr only.
//!
//! Exit codes: 0 success; 1 error (bad config, bad expression, numerical
//! failure); 2 parameters not admissible (`admissible`, or the gate inside
//! `solve`); 3 solver finished without converging; 4 verification failures.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use kgm_core::{
    admissible_report, alpha0, check_admissible, eigen_decomposition, field_csv,
    mountain_pass_solve, run_verification, solve_report, spectrum_report, threshold_csv,
    verify_report, Error, JsonValue, ModelParams, PotentialSpec, RadialGrid, SolverOptions,
};

use config::Config;

#[derive(Parser)]
#[command(
    name = "kgm",
    version,
    about = "Radially symmetric standing waves of a mixed local/nonlocal \
             Klein-Gordon-Maxwell system",
    after_help = "Configuration: --config FILE reads flat `key = value` lines \
                  (model keys s, alpha, p, omega, potential.*; sections grid.*, \
                  solver.*, spectrum.*, threshold.*); \
                  command-line flags override the file. THREADS is the only \
                  environment override; the kernels are currently sequential, so \
                  values above 1 are accepted and ignored."
)]
struct Cli {
    /// Configuration file (flat key = value)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for output files (created if missing)
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Stdout format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Ball radius R (overrides grid.radius)
    #[arg(long = "R", global = true, value_name = "RADIUS")]
    radius: Option<f64>,

    /// Interior grid nodes N (overrides grid.n)
    #[arg(long = "N", global = true, value_name = "NODES")]
    n: Option<usize>,

    /// Convergence tolerance on the preconditioned gradient norm
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Total solver iteration budget
    #[arg(long, global = true)]
    max_iters: Option<usize>,

    /// Seed bump amplitude a in a·exp(−(r/w)²)
    #[arg(long, global = true)]
    seed_amplitude: Option<f64>,

    /// Seed bump width w
    #[arg(long, global = true)]
    seed_width: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check the standing-wave existence conditions
    Admissible,
    /// Tabulate the admissibility threshold over s for several gap values
    ThresholdTable,
    /// Compute a mountain-pass standing wave and its electrostatic potential
    Solve,
    /// Lowest eigenvalues of the linearized operator with the potential
    Spectrum,
    /// Run the built-in verification battery
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Admissible => "admissible",
            Command::ThresholdTable => "threshold-table",
            Command::Solve => "solve",
            Command::Spectrum => "spectrum",
            Command::Verify => "verify",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Effective settings after merging defaults, the config file, and flags.
struct Settings {
    params: ModelParams,
    radius: f64,
    n: usize,
    options: SolverOptions,
    spectrum_k: usize,
    threshold_points: usize,
    threshold_gaps: Vec<f64>,
    out: PathBuf,
    format: Format,
}

fn build_settings(cli: &Cli) -> Result<Settings, String> {
    let cfg = match &cli.config {
        Some(path) => Config::from_file(path).map_err(|e| e.to_string())?,
        None => Config::default(),
    };

    let potential = match (cfg.potential_kind, &cfg.potential_m, &cfg.potential_expr) {
        (None, None, None) => PotentialSpec::constant(1.0),
        (Some(config::PotentialKind::Constant), Some(m), None) => PotentialSpec::constant(*m),
        (Some(config::PotentialKind::Coercive), None, Some(expr)) => {
            PotentialSpec::coercive(expr).map_err(|e| e.to_string())?
        }
        _ => unreachable!("rejected at parse time"),
    };
    let params = ModelParams::new(
        cfg.s.unwrap_or(0.5),
        cfg.alpha.unwrap_or(0.0),
        cfg.p.unwrap_or(4.0),
        cfg.omega.unwrap_or(0.3),
        potential,
    )
    .map_err(|e| e.to_string())?;

    // The verification battery has its own reference resolution; the other
    // commands default to the production grid.
    let (def_radius, def_n) = match cli.command {
        Command::Verify => (16.0, 127),
        _ => (20.0, 511),
    };
    let radius = cli.radius.or(cfg.radius).unwrap_or(def_radius);
    let n = cli.n.or(cfg.n).unwrap_or(def_n);

    let defaults = SolverOptions::default();
    let options = SolverOptions {
        path_points: cfg.path_points.unwrap_or(defaults.path_points),
        tol: cli.tol.or(cfg.tol).unwrap_or(defaults.tol),
        max_iters: cli.max_iters.or(cfg.max_iters).unwrap_or(defaults.max_iters),
        path_iters: cfg.path_iters.unwrap_or(defaults.path_iters),
        seed_amplitude: cli
            .seed_amplitude
            .or(cfg.seed_amplitude)
            .unwrap_or(defaults.seed_amplitude),
        seed_width: cli
            .seed_width
            .or(cfg.seed_width)
            .unwrap_or(defaults.seed_width),
        phi_tol: cfg.phi_tol.unwrap_or(defaults.phi_tol),
    };

    Ok(Settings {
        params,
        radius,
        n,
        options,
        spectrum_k: cfg.spectrum_k.unwrap_or(8),
        threshold_points: cfg.threshold_points.unwrap_or(10_000),
        threshold_gaps: cfg.threshold_gaps.unwrap_or_else(|| vec![0.1, 1.0, 10.0]),
        out: cli.out.clone(),
        format: cli.format,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    note_thread_override();

    let settings = match build_settings(&cli) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("kgm {}: {msg}", cli.command.name());
            return ExitCode::from(1);
        }
    };

    let start = Instant::now();
    let code = match cli.command {
        Command::Admissible => cmd_admissible(&settings),
        Command::ThresholdTable => cmd_threshold_table(&settings),
        Command::Solve => cmd_solve(&settings),
        Command::Spectrum => cmd_spectrum(&settings),
        Command::Verify => cmd_verify(&settings),
    };
    eprintln!(
        "kgm {}: finished in {:.3}s (exit {code})",
        cli.command.name(),
        start.elapsed().as_secs_f64()
    );
    ExitCode::from(code)
}

/// THREADS is the documented environment override for worker count. The
/// numerical kernels are sequential, so it is validated and acknowledged but
/// has no effect yet.
fn note_thread_override() {
    if let Ok(v) = std::env::var("THREADS") {
        match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => {
                if t > 1 {
                    eprintln!("kgm: THREADS={t} requested; kernels are sequential, using 1");
                }
            }
            _ => eprintln!("kgm: ignoring invalid THREADS value '{v}'"),
        }
    }
}

fn fail(command: &str, err: &Error) -> u8 {
    eprintln!("kgm {command}: {err}");
    match err {
        Error::NotAdmissible(_) => 2,
        _ => 1,
    }
}

fn write_out(out: &Path, files: &[(&str, String)]) -> Result<(), u8> {
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("kgm: cannot create output directory {}: {e}", out.display());
        return Err(1);
    }
    for (name, text) in files {
        let path = out.join(name);
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("kgm: cannot write {}: {e}", path.display());
            return Err(1);
        }
    }
    Ok(())
}

/// Print a report to stdout in the selected format.
fn emit(report: &JsonValue, format: Format) {
    match format {
        Format::Json => print!("{}", report.render()),
        Format::Csv => print!("{}", flatten_csv(report)),
    }
}

/// Flatten a JSON document into a two-column `key,value` CSV with dotted and
/// indexed paths, preserving insertion order.
fn flatten_csv(value: &JsonValue) -> String {
    fn csv_cell(s: &str) -> String {
        if s.contains(',') || s.contains('"') || s.contains('\n') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_owned()
        }
    }
    fn walk(value: &JsonValue, path: &str, rows: &mut String) {
        match value {
            JsonValue::Object(entries) => {
                for (key, v) in entries {
                    let sub = if path.is_empty() {
                        key.clone()
                    } else {
                        format!("{path}.{key}")
                    };
                    walk(v, &sub, rows);
                }
            }
            JsonValue::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(v, &format!("{path}[{i}]"), rows);
                }
            }
            scalar => {
                let text = match scalar {
                    JsonValue::Null => String::new(),
                    JsonValue::Bool(b) => b.to_string(),
                    JsonValue::Int(i) => i.to_string(),
                    JsonValue::Float(x) => format!("{x}"),
                    JsonValue::Str(s) => csv_cell(s),
                    _ => unreachable!(),
                };
                rows.push_str(&csv_cell(path));
                rows.push(',');
                rows.push_str(&text);
                rows.push('\n');
            }
        }
    }
    let mut rows = String::from("key,value\n");
    walk(value, "", &mut rows);
    rows
}

fn cmd_admissible(st: &Settings) -> u8 {
    match check_admissible(&st.params) {
        Ok(report) => {
            emit(&admissible_report(&st.params, &report), st.format);
            if report.admissible {
                0
            } else {
                2
            }
        }
        Err(e) => fail("admissible", &e),
    }
}

fn cmd_threshold_table(st: &Settings) -> u8 {
    let points = st.threshold_points;
    if points < 2 {
        eprintln!("kgm threshold-table: threshold.points must be at least 2");
        return 1;
    }
    let s_points: Vec<f64> = (1..=points)
        .map(|i| i as f64 / (points + 1) as f64)
        .collect();
    let mut table = Vec::with_capacity(points);
    for &s in &s_points {
        let mut row = Vec::with_capacity(st.threshold_gaps.len());
        for &gap in &st.threshold_gaps {
            match alpha0(s, gap) {
                Ok(a) => row.push(a),
                Err(e) => return fail("threshold-table", &e),
            }
        }
        table.push(row);
    }
    let csv = threshold_csv(&s_points, &st.threshold_gaps, &table);
    if let Err(code) = write_out(&st.out, &[("threshold.csv", csv.clone())]) {
        return code;
    }
    match st.format {
        Format::Csv => print!("{csv}"),
        Format::Json => {
            let summary = JsonValue::Object(vec![
                ("points".into(), points.into()),
                (
                    "gaps".into(),
                    JsonValue::Array(
                        st.threshold_gaps.iter().map(|&g| g.into()).collect(),
                    ),
                ),
                ("s_first".into(), s_points[0].into()),
                ("s_last".into(), s_points[points - 1].into()),
                (
                    "alpha0_first".into(),
                    JsonValue::Array(table[0].iter().map(|&a| a.into()).collect()),
                ),
                (
                    "alpha0_last".into(),
                    JsonValue::Array(
                        table[points - 1].iter().map(|&a| a.into()).collect(),
                    ),
                ),
                ("file".into(), "threshold.csv".into()),
            ]);
            print!("{}", summary.render());
        }
    }
    0
}

fn make_grid(st: &Settings, command: &str) -> Result<Arc<RadialGrid>, u8> {
    RadialGrid::new(st.radius, st.n).map_err(|e| fail(command, &e))
}

fn cmd_solve(st: &Settings) -> u8 {
    let grid = match make_grid(st, "solve") {
        Ok(g) => g,
        Err(code) => return code,
    };
    match mountain_pass_solve(&grid, &st.params, &st.options) {
        Ok(result) => {
            let report = solve_report(&result, st.radius, st.n);
            let files = [
                ("report.json", report.render()),
                ("u.csv", field_csv(&result.u, "u")),
                ("phi.csv", field_csv(&result.phi, "phi")),
            ];
            if let Err(code) = write_out(&st.out, &files) {
                return code;
            }
            emit(&report, st.format);
            if result.converged {
                0
            } else {
                eprintln!(
                    "kgm solve: not converged after {} iterations (grad norm {:.3e})",
                    result.iterations, result.grad_norm
                );
                3
            }
        }
        Err(e) => fail("solve", &e),
    }
}

fn cmd_spectrum(st: &Settings) -> u8 {
    let grid = match make_grid(st, "spectrum") {
        Ok(g) => g,
        Err(code) => return code,
    };
    match eigen_decomposition(&grid, &st.params, st.spectrum_k) {
        Ok(result) => {
            let report = spectrum_report(&st.params, &result, st.radius, st.n);
            if let Err(code) = write_out(&st.out, &[("spectrum.json", report.render())]) {
                return code;
            }
            emit(&report, st.format);
            0
        }
        Err(e) => fail("spectrum", &e),
    }
}

fn cmd_verify(st: &Settings) -> u8 {
    match run_verification(st.radius, st.n) {
        Ok(checks) => {
            let report = verify_report(&checks);
            if let Err(code) = write_out(&st.out, &[("verify.json", report.render())]) {
                return code;
            }
            emit(&report, st.format);
            if checks.iter().all(|c| c.passed) {
                0
            } else {
                4
            }
        }
        Err(e) => fail("verify", &e),
    }
}
