//! `magnomech` command-line front end.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use magnomech::Error;

#[derive(Debug, Parser)]
#[command(
    name = "magnomech",
    version,
    about = "Gaussian entanglement dynamics of waveguide-coupled magnomechanical chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the covariance from the thermal state and record the log-negativity.
    Simulate(SimulateArgs),
    /// Solve for the algebraic steady state of a stable scenario.
    Steady(SteadyArgs),
    /// Log-negativity of a stored covariance matrix (CSV to stdout).
    Ln(LnArgs),
    /// Run a catalog preset or a grid document.
    Sweep(SweepArgs),
    /// Inspect the preset catalog.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
    /// Check a config file and print the derived internal parameters.
    Validate(ValidateArgs),
}

#[derive(Debug, Subcommand)]
enum PresetsAction {
    /// One line per preset: name, grid points, evaluation, partitions.
    List,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// End time, in the config's internal time unit.
    #[arg(long)]
    t_max: f64,
    #[arg(long, default_value_t = magnomech::dynamics::DEFAULT_DT)]
    dt: f64,
    /// Bipartition such as `m2|b1` or `b1|m2..`; repeatable.
    #[arg(long = "partition", required = true)]
    partitions: Vec<String>,
    /// Output every this many integrator steps.
    #[arg(long, default_value_t = 500)]
    sample_every: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write every sampled covariance matrix as JSON.
    #[arg(long)]
    trajectory: bool,
}

#[derive(Debug, Args)]
struct SteadyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long = "partition", required = true)]
    partitions: Vec<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct LnArgs {
    /// Covariance matrix JSON, as written by `steady`.
    #[arg(long)]
    cm: PathBuf,
    #[arg(long = "partition", required = true)]
    partitions: Vec<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    preset: Option<String>,
    /// TOML grid document.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Evaluate at the algebraic steady state instead of the preset's time.
    #[arg(long)]
    steady: bool,
    #[arg(long, default_value_t = magnomech::dynamics::DEFAULT_DT)]
    dt: f64,
    /// Side length of two-parameter preset maps.
    #[arg(long, default_value_t = magnomech::sweeps::DEFAULT_MAP_RESOLUTION)]
    resolution: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
}

/// 1: bad input, 2: numerical failure, 3: unstable drift.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unstable { .. } => 3,
        e if e.is_input_error() => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Steady(a) => commands::steady(&a),
        Command::Ln(a) => commands::ln(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Presets {
            action: PresetsAction::List,
        } => commands::presets_list(),
        Command::Validate(a) => commands::validate(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
