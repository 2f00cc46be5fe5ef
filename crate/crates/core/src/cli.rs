//! Command-line interface.
//!
//! One binary, one config file, subcommands per artifact. Point data goes to
//! stdout as JSON; curve data as CSV (stamped with the resolved-config
//! hash); figure data additionally lands in the output directory together
//! with an SVG rendering. The resolved config itself is echoed to stderr so
//! every run records the defaults it actually used.
//!
//! Exit codes: 0 success, 2 config error, 3 usage error, 4 domain or
//! singular-parameter error, 5 numerical failure, 6 verification failure,
//! 7 i/o error.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::{ResolvedConfig, RunConfig};
use crate::error::{Error, Result};
use crate::exact::SolutionFamily;
use crate::fvm;
use crate::interval::Interval;
use crate::output::{self, Panel, Series, SeriesStyle};
use crate::singularity::{self, Branch};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;
pub const EXIT_NUMERIC: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;
pub const EXIT_IO: i32 = 7;

#[derive(Parser)]
#[command(
    name = "eulerflow",
    version,
    about = "Exact multivalued solutions, caustics and shock fronts of 1D gas flows"
)]
struct Cli {
    /// Run-config JSON file.
    #[arg(long, global = true, default_value = "configs/reference.json")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the thermodynamic state (p, e, s) at (v, T).
    #[command(allow_negative_numbers = true)]
    State {
        #[arg(long)]
        v: f64,
        #[arg(long = "T")]
        temperature: f64,
    },
    /// Report the process curve at one density: state, dp/drho, A(rho),
    /// hyperbolicity classification, integrability of the pressure law.
    #[command(allow_negative_numbers = true)]
    Process {
        #[arg(long)]
        rho: f64,
    },
    /// All density branches at a point (t, x), as JSON.
    #[command(allow_negative_numbers = true)]
    Solve {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
    },
    /// Profile section at time t: CSV x,rho,u on stdout.
    #[command(allow_negative_numbers = true)]
    Section {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// One caustic branch: CSV rho,t,x on stdout.
    Caustic {
        /// + or -
        #[arg(long, default_value = "+")]
        branch: String,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// The shock birth point (cusp of the forward caustic), as JSON.
    Cusp,
    /// Shock front samples: CSV t,x,rho1,rho2 on stdout.
    #[command(allow_negative_numbers = true)]
    Front {
        /// Defaults to the cusp time.
        #[arg(long)]
        t_min: Option<f64>,
        /// Defaults to 1.2x the cusp time.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 128)]
        steps: usize,
    },
    /// Run the verification suite; nonzero exit on any failed check.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Finite-volume cross-check: writes the final profile CSV and prints a
    /// summary (mass drift, located shock, analytic front comparison).
    #[command(allow_negative_numbers = true)]
    Fvm {
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// Defaults to 1.2x the cusp time.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 800)]
        cells: usize,
        #[arg(long, default_value_t = 0.45)]
        cfl: f64,
        /// Defaults derived from the profile range at t0.
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        /// Profile CSV path; defaults to <output_dir>/fvm_profile.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Figure data (CSV) plus a small SVG rendering.
    Figure {
        #[command(subcommand)]
        figure: FigureCommand,
    },
}

#[derive(Subcommand)]
enum FigureCommand {
    /// Density sections at the given times (comma separated), one panel per
    /// time.
    #[command(allow_negative_numbers = true)]
    Density {
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
    /// Caustic and shock front overlay in the (t, x) plane.
    #[command(allow_negative_numbers = true)]
    Front {
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 160)]
        steps: usize,
    },
}

/// Entry point used by `main` and by tests. Never panics on user input.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    let resolved = match load_config(&cli.config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    // the resolved-config echo: every default made explicit
    eprintln!(
        "resolved config ({}): {}",
        resolved.hash(),
        resolved.canonical_json()
    );

    match dispatch(&cli.command, &resolved) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

fn load_config(path: &Path) -> Result<ResolvedConfig> {
    RunConfig::from_path(path)?.resolve()
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Domain(_)
        | Error::Singular(_)
        | Error::Ambiguous(_)
        | Error::NoThermalModel
        | Error::MonotoneCaustic => EXIT_DOMAIN,
        Error::Numeric(_) => EXIT_NUMERIC,
        Error::Io(_) => EXIT_IO,
    }
}

fn dispatch(command: &Command, cfg: &ResolvedConfig) -> Result<i32> {
    match command {
        Command::State { v, temperature } => {
            let model = cfg.build_model()?;
            let state = model.eval_state(*v, *temperature)?;
            let kappa = model.kappa_at(*v, *temperature)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "state": state,
                    "kappa": kappa,
                }))
                .expect("json")
            );
            Ok(EXIT_OK)
        }
        Command::Process { rho } => {
            let curve = cfg.build_curve()?;
            let report = curve.classify_at(*rho)?;
            let state = curve.state(*rho).ok();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "rho": rho,
                    "state": state,
                    "pressure": curve.pressure(*rho)?,
                    "dp_drho": curve.dp_drho(*rho)?,
                    "a_coeff": curve.a_coeff(*rho).ok(),
                    "a_prime": curve.a_prime(*rho).ok(),
                    "classification": report.classification,
                    "pairing_det": report.det,
                    "cubic_pressure_law": curve.is_characteristically_integrable(1e-8).ok(),
                }))
                .expect("json")
            );
            Ok(EXIT_OK)
        }
        Command::Solve { t, x } => {
            let family = cfg.build_family()?;
            let set = family.branches(*t, *x, cfg.rho_window())?;
            println!("{}", serde_json::to_string_pretty(&set).expect("json"));
            Ok(EXIT_OK)
        }
        Command::Section { t, samples } => {
            let family = cfg.build_family()?;
            let rows = section_rows(&family, *t, cfg.rho_window(), *samples)?;
            print!("{}", output::render_csv(&cfg.hash(), &["x", "rho", "u"], &rows));
            Ok(EXIT_OK)
        }
        Command::Caustic { branch, samples } => {
            let family = cfg.build_family()?;
            let branch: Branch = branch.parse()?;
            let window = cfg.rho_window();
            let grid = Interval::positive(window.0, window.1)?.scan_grid(*samples);
            let curve = singularity::caustic(&family, branch, &grid)?;
            let rows: Vec<Vec<f64>> = curve
                .samples
                .iter()
                .map(|s| vec![s.rho, s.t, s.x])
                .collect();
            print!("{}", output::render_csv(&cfg.hash(), &["rho", "t", "x"], &rows));
            Ok(EXIT_OK)
        }
        Command::Cusp => {
            let family = cfg.build_family()?;
            let c = singularity::cusp(&family, singularity::forward_branch(&family))?;
            println!("{}", serde_json::to_string_pretty(&c).expect("json"));
            Ok(EXIT_OK)
        }
        Command::Front {
            t_min,
            t_max,
            steps,
        } => {
            let family = cfg.build_family()?;
            let cusp = singularity::cusp(&family, singularity::forward_branch(&family))?;
            let span = 0.2 * cusp.t.abs().max(1.0);
            let lo = t_min.unwrap_or(cusp.t);
            let hi = t_max.unwrap_or(cusp.t + span);
            let front = singularity::shock_front_from(&family, &cusp, (lo, hi), *steps)?;
            let rows: Vec<Vec<f64>> = front
                .samples
                .iter()
                .map(|s| vec![s.t, s.x, s.rho_left, s.rho_right])
                .collect();
            print!(
                "{}",
                output::render_csv(&cfg.hash(), &["t", "x", "rho1", "rho2"], &rows)
            );
            Ok(EXIT_OK)
        }
        Command::Verify { seed, samples } => {
            let family = cfg.build_family()?;
            let report = verify::run_verification(&family, *seed, *samples)?;
            print!("{}", report.render_table());
            if report.all_passed() {
                println!("verification passed ({} checks)", report.checks.len());
                Ok(EXIT_OK)
            } else {
                println!("verification FAILED");
                Ok(EXIT_VERIFY)
            }
        }
        Command::Fvm {
            t0,
            t_end,
            cells,
            cfl,
            x_min,
            x_max,
            out,
        } => run_fvm(cfg, *t0, *t_end, *cells, *cfl, *x_min, *x_max, out.as_deref()),
        Command::Figure { figure } => match figure {
            FigureCommand::Density { times } => figure_density(cfg, times),
            FigureCommand::Front { t_max, steps } => figure_front(cfg, *t_max, *steps),
        },
    }
}

fn section_rows(
    family: &SolutionFamily,
    t: f64,
    window: (f64, f64),
    samples: usize,
) -> Result<Vec<Vec<f64>>> {
    let grid = Interval::positive(window.0, window.1)?.scan_grid(samples.max(2));
    let section = family.profile_section(t, &grid)?;
    Ok(section.iter().map(|p| vec![p.x, p.rho, p.u]).collect())
}

/// Default spatial domain: the x-range covered by the density window at t0,
/// shrunk by 1% so every cell center keeps a branch.
fn default_fvm_domain(family: &SolutionFamily, t0: f64, window: (f64, f64)) -> Result<(f64, f64)> {
    let a = family.g(window.0, t0)?;
    let b = family.g(window.1, t0)?;
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let pad = 0.01 * (hi - lo);
    Ok((lo + pad, hi - pad))
}

#[allow(clippy::too_many_arguments)]
fn run_fvm(
    cfg: &ResolvedConfig,
    t0: f64,
    t_end: Option<f64>,
    cells: usize,
    cfl: f64,
    x_min: Option<f64>,
    x_max: Option<f64>,
    out: Option<&Path>,
) -> Result<i32> {
    let family = cfg.build_family()?;
    let window = cfg.rho_window();
    let cusp = singularity::cusp(&family, singularity::forward_branch(&family)).ok();
    let t_end = match (t_end, &cusp) {
        (Some(t), _) => t,
        (None, Some(c)) => 1.2 * c.t,
        (None, None) => {
            return Err(Error::domain(
                "no cusp found: pass --t-end explicitly".to_string(),
            ))
        }
    };
    let (dx_min, dx_max) = default_fvm_domain(&family, t0, window)?;
    let spec = fvm::GridSpec {
        x_min: x_min.unwrap_or(dx_min),
        x_max: x_max.unwrap_or(dx_max),
        n_cells: cells,
    };
    let state = fvm::init_from_analytic(&family, t0, spec, window)?;
    let report = fvm::run_to(
        &family.curve().clone(),
        state,
        t_end,
        cfl,
        fvm::BoundaryCondition::Outflow,
    )?;

    let rows: Vec<Vec<f64>> = (0..report.state.n_cells())
        .map(|i| {
            vec![
                report.state.cell_center(i),
                report.state.rho[i],
                report.state.velocity(i),
            ]
        })
        .collect();
    let out_path = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| Path::new(&cfg.output_dir).join("fvm_profile.csv"));
    output::write_csv(&out_path, &cfg.hash(), &["x", "rho", "u"], &rows)?;

    let shock = fvm::locate_shock(&report.state);
    let front_x = match &cusp {
        Some(c) if t_end > c.t => {
            singularity::shock_front_from(&family, c, (t_end, t_end), 1)
                .ok()
                .and_then(|f| f.samples.first().map(|s| s.x))
        }
        _ => None,
    };
    let dx = report.state.dx();
    let offset_cells = match (&shock, front_x) {
        (Some(s), Some(fx)) => Some((s.x - fx).abs() / dx),
        _ => None,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "t0": t0,
            "t_end": t_end,
            "cells": cells,
            "dx": dx,
            "steps": report.steps,
            "mass_conservation_residual": report.mass_conservation_residual,
            "shock": shock,
            "analytic_front_x": front_x,
            "shock_offset_cells": offset_cells,
            "profile_csv": out_path.display().to_string(),
        }))
        .expect("json")
    );
    Ok(EXIT_OK)
}

fn figure_density(cfg: &ResolvedConfig, times: &[f64]) -> Result<i32> {
    let family = cfg.build_family()?;
    let outdir = Path::new(&cfg.output_dir);
    let mut panels = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let rows = section_rows(&family, t, cfg.rho_window(), 600)?;
        let path = outdir.join(format!("density_{}.csv", i + 1));
        output::write_csv(&path, &cfg.hash(), &["x", "rho", "u"], &rows)?;
        println!("{}", path.display());
        panels.push(Panel {
            title: format!("t = {t}"),
            x_label: "x".to_string(),
            y_label: "rho".to_string(),
            series: vec![Series {
                label: String::new(),
                points: rows.iter().map(|r| (r[0], r[1])).collect(),
                style: SeriesStyle::Line,
            }],
        });
    }
    let svg = outdir.join("density.svg");
    output::write_svg(&svg, &panels)?;
    println!("{}", svg.display());
    Ok(EXIT_OK)
}

fn figure_front(cfg: &ResolvedConfig, t_max: Option<f64>, steps: usize) -> Result<i32> {
    let family = cfg.build_family()?;
    let outdir = Path::new(&cfg.output_dir);
    let window = cfg.rho_window();
    let grid = Interval::positive(window.0, window.1)?.scan_grid(600);

    let mut caustic_files = Vec::new();
    for (branch, name) in [(Branch::Plus, "caustic_plus"), (Branch::Minus, "caustic_minus")] {
        let curve = singularity::caustic(&family, branch, &grid)?;
        let rows: Vec<Vec<f64>> = curve
            .samples
            .iter()
            .map(|s| vec![s.rho, s.t, s.x])
            .collect();
        let path = outdir.join(format!("{name}.csv"));
        output::write_csv(&path, &cfg.hash(), &["rho", "t", "x"], &rows)?;
        println!("{}", path.display());
        caustic_files.push((branch, curve));
    }

    let cusp = singularity::cusp(&family, singularity::forward_branch(&family))?;
    let hi = t_max.unwrap_or(cusp.t + 0.2 * cusp.t.abs().max(1.0));
    let front = singularity::shock_front_from(&family, &cusp, (cusp.t, hi), steps)?;
    let rows: Vec<Vec<f64>> = front
        .samples
        .iter()
        .map(|s| vec![s.t, s.x, s.rho_left, s.rho_right])
        .collect();
    let front_path = outdir.join("front.csv");
    output::write_csv(&front_path, &cfg.hash(), &["t", "x", "rho1", "rho2"], &rows)?;
    println!("{}", front_path.display());

    // overlay panel: forward caustic near the cusp plus the front points
    let forward = singularity::forward_branch(&family);
    let caustic_points: Vec<(f64, f64)> = caustic_files
        .iter()
        .find(|(b, _)| *b == forward)
        .map(|(_, c)| {
            c.samples
                .iter()
                .filter(|s| s.t <= hi + 0.05 * hi.abs())
                .map(|s| (s.t, s.x))
                .collect()
        })
        .unwrap_or_default();
    let panel = Panel {
        title: "caustic and shock front".to_string(),
        x_label: "t".to_string(),
        y_label: "x".to_string(),
        series: vec![
            Series {
                label: "caustic".to_string(),
                points: caustic_points,
                style: SeriesStyle::Line,
            },
            Series {
                label: "front".to_string(),
                points: front.samples.iter().map(|s| (s.t, s.x)).collect(),
                style: SeriesStyle::Dots,
            },
        ],
    };
    let svg = outdir.join("front.svg");
    output::write_svg(&svg, &[panel])?;
    println!("{}", svg.display());
    Ok(EXIT_OK)
}
