//! `rydcav` binary: photon-correlation simulations of a driven cavity coupled
//! to a saturable collective matter excitation, from the command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use rydcav::models::ModelVariant;
use rydcav::params::PhysicalParams;
use rydcav_cli::run::RunError;
use rydcav_cli::{config, csvio, exit, run, svg};

#[derive(Parser)]
#[command(
    name = "rydcav",
    version,
    about = "Photon-correlation simulator: g2(0) sweeps, g2(tau) traces, and \
             model comparisons for a driven cavity coupled to a saturable \
             collective excitation",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct Common {
    /// Parameter file of `key = value` lines; omitted fields keep the
    /// bundled reference values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Direct value of g^2 N in gamma_e^2, overriding both the parameter
    /// file and the cooperativity convention
    #[arg(long, value_name = "FLOAT")]
    g2n_override: Option<f64>,

    /// Total-excitation cutoff of the truncated basis
    #[arg(long, value_name = "INT", default_value_t = 6)]
    cutoff: u32,
}

impl Common {
    fn params(&self) -> Result<PhysicalParams, RunError> {
        let mut p = match &self.config {
            Some(path) => {
                config::load_config(path).map_err(|e| RunError::Config(e.to_string()))?
            }
            None => PhysicalParams::reference(),
        };
        if let Some(g2n) = self.g2n_override {
            p.g2n_override = Some(g2n);
            p.validate().map_err(|e| run::from_core(&e))?;
        }
        Ok(p)
    }
}

/// Reduced-detuning grid flags.
#[derive(Args)]
struct GridArgs {
    /// Lower edge of the reduced-detuning grid, in gamma_e
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    theta_min: f64,

    /// Upper edge of the reduced-detuning grid, in gamma_e
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    theta_max: f64,

    /// Grid spacing, in gamma_e
    #[arg(long, default_value_t = 0.05)]
    theta_step: f64,
}

/// Output-location and parallelism flags.
#[derive(Args)]
struct OutArgs {
    /// Directory the CSV and SVG files are written into (created if missing)
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Worker threads for sweep points; 0 means one per logical CPU
    #[arg(long, value_name = "INT", default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the effective parameters derived from the configuration
    EffectiveParams {
        #[command(flatten)]
        common: Common,
    },
    /// Locate the drive detuning that maximizes the stationary photon number
    FindRefDetuning {
        #[command(flatten)]
        common: Common,

        /// Model whose photon number is maximized
        #[arg(long, default_value = "spin", value_parser = run::parse_model)]
        model: ModelVariant,
    },
    /// Sweep g2(0) over the reduced detuning and write CSV + SVG
    SweepG2zero {
        #[command(flatten)]
        common: Common,

        #[command(flatten)]
        grid: GridArgs,

        #[command(flatten)]
        out: OutArgs,

        /// Model to sweep
        #[arg(long, default_value = "spin", value_parser = run::parse_model)]
        model: ModelVariant,
    },
    /// Sample g2(tau) at a fixed reduced detuning and write CSV + SVG
    G2tau {
        #[command(flatten)]
        common: Common,

        /// Reduced detuning theta = (delta_c - delta_c0) / gamma_e
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,

        /// Model to sample
        #[arg(long, default_value = "spin", value_parser = run::parse_model)]
        model: ModelVariant,

        /// Largest delay, in 1/gamma_e
        #[arg(long, default_value_t = 20.0)]
        tau_max: f64,

        /// Number of equally spaced delay samples (including 0 and tau_max)
        #[arg(long, default_value_t = 400)]
        points: usize,

        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare spin-bubble and two-boson g2(0) curves and write CSV + SVG
    CompareModels {
        #[command(flatten)]
        common: Common,

        #[command(flatten)]
        grid: GridArgs,

        #[command(flatten)]
        out: OutArgs,
    },
}

fn write_file(path: &Path, content: &str) -> Result<(), RunError> {
    std::fs::write(path, content)
        .map_err(|e| RunError::Config(format!("cannot write `{}`: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("cannot read `{}`: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| RunError::Config(format!("cannot create `{}`: {e}", dir.display())))
}

/// A parse failure on a file this process just wrote is a bug, not user
/// error; still surfaced cleanly.
fn internal(e: String) -> RunError {
    RunError::Config(format!("internal: regenerated CSV failed to parse: {e}"))
}

fn cmd_effective_params(common: &Common) -> Result<i32, RunError> {
    let p = common.params()?;
    print!("{}", run::effective_params_report(&p)?);
    Ok(exit::SUCCESS)
}

fn cmd_find_ref_detuning(common: &Common, model: ModelVariant) -> Result<i32, RunError> {
    let p = common.params()?;
    let delta_c0 = run::locate_reference_detuning(&p, model, common.cutoff)?;
    println!("model = {model}");
    println!("delta_c0 = {}", csvio::fmt17(delta_c0));
    Ok(exit::SUCCESS)
}

fn cmd_sweep(
    common: &Common,
    grid: &GridArgs,
    out: &OutArgs,
    model: ModelVariant,
) -> Result<i32, RunError> {
    let p = common.params()?;
    let thetas = run::theta_grid(grid.theta_min, grid.theta_max, grid.theta_step)?;
    ensure_dir(&out.out)?;
    let result = run::run_sweep(&p, model, &thetas, common.cutoff, out.workers)?;

    let meta = [
        ("command", "sweep-g2zero".to_owned()),
        ("model", model.name().to_owned()),
        ("cutoff", common.cutoff.to_string()),
        ("delta_c0", csvio::fmt17(result.delta_c0)),
        ("alpha", csvio::fmt17(p.alpha)),
    ];
    let csv_path = out.out.join("sweep_g2zero.csv");
    write_file(&csv_path, &csvio::write_sweep_csv(&meta, &result.rows))?;

    // The plot is rendered from the file just written, never from in-memory
    // state, so it stays regenerable from the CSV alone.
    let (meta, rows) = csvio::parse_sweep_csv(&read_file(&csv_path)?).map_err(internal)?;
    let svg_path = out.out.join("sweep_g2zero.svg");
    write_file(&svg_path, &svg::sweep_svg(&meta, &rows))?;

    println!("delta_c0 = {}", csvio::fmt17(result.delta_c0));
    println!("points = {}", result.rows.len());
    println!("failed_points = {}", result.failed);
    println!("wrote {}", csv_path.display());
    println!("wrote {}", svg_path.display());
    Ok(if result.failed > 0 { exit::PARTIAL } else { exit::SUCCESS })
}

fn cmd_g2tau(
    common: &Common,
    theta: f64,
    model: ModelVariant,
    tau_max: f64,
    points: usize,
    out: &OutArgs,
) -> Result<i32, RunError> {
    let p = common.params()?;
    ensure_dir(&out.out)?;
    let result = run::run_g2tau(&p, model, theta, tau_max, points, common.cutoff)?;

    let period_text = result
        .predicted_period
        .map_or_else(|| "none".to_owned(), csvio::fmt17);
    let meta = [
        ("command", "g2tau".to_owned()),
        ("model", model.name().to_owned()),
        ("cutoff", common.cutoff.to_string()),
        ("theta", csvio::fmt17(theta)),
        ("delta_c0", csvio::fmt17(result.delta_c0)),
        ("delta_c", csvio::fmt17(result.delta_c)),
        ("predicted_oscillation_period", period_text.clone()),
    ];
    let csv_path = out.out.join("g2tau.csv");
    write_file(
        &csv_path,
        &csvio::write_tau_csv(&meta, &result.trace.taus, &result.trace.values),
    )?;

    let (meta, taus, values) = csvio::parse_tau_csv(&read_file(&csv_path)?).map_err(internal)?;
    let svg_path = out.out.join("g2tau.svg");
    write_file(&svg_path, &svg::tau_svg(&meta, &taus, &values))?;

    println!("delta_c0 = {}", csvio::fmt17(result.delta_c0));
    println!("delta_c = {}", csvio::fmt17(result.delta_c));
    println!("predicted_oscillation_period = {period_text}");
    println!("wrote {}", csv_path.display());
    println!("wrote {}", svg_path.display());
    Ok(exit::SUCCESS)
}

fn cmd_compare(common: &Common, grid: &GridArgs, out: &OutArgs) -> Result<i32, RunError> {
    let p = common.params()?;
    let thetas = run::theta_grid(grid.theta_min, grid.theta_max, grid.theta_step)?;
    ensure_dir(&out.out)?;
    let result = run::run_compare(&p, &thetas, common.cutoff, out.workers)?;

    let meta = [
        ("command", "compare-models".to_owned()),
        ("cutoff", common.cutoff.to_string()),
        ("delta_c0", csvio::fmt17(result.delta_c0)),
    ];
    let csv_path = out.out.join("compare_models.csv");
    write_file(&csv_path, &csvio::write_compare_csv(&meta, &result.rows))?;

    let (meta, rows) = csvio::parse_compare_csv(&read_file(&csv_path)?).map_err(internal)?;
    let svg_path = out.out.join("compare_models.svg");
    write_file(&svg_path, &svg::compare_svg(&meta, &rows))?;

    println!("delta_c0 = {}", csvio::fmt17(result.delta_c0));
    println!("points = {}", result.rows.len());
    println!("failed_points = {}", result.failed);
    println!("wrote {}", csv_path.display());
    println!("wrote {}", svg_path.display());
    Ok(if result.failed > 0 { exit::PARTIAL } else { exit::SUCCESS })
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.cmd {
        Cmd::EffectiveParams { common } => cmd_effective_params(common),
        Cmd::FindRefDetuning { common, model } => cmd_find_ref_detuning(common, *model),
        Cmd::SweepG2zero { common, grid, out, model } => cmd_sweep(common, grid, out, *model),
        Cmd::G2tau { common, theta, model, tau_max, points, out } => {
            cmd_g2tau(common, *theta, *model, *tau_max, *points, out)
        }
        Cmd::CompareModels { common, grid, out } => cmd_compare(common, grid, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(real_main());
}
