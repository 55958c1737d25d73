//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! runtime, numerical and I/O failures.

mod config;
mod output;
mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{
    load_config, parse_config, parse_config_with, ConfigError, HamiltonianConfig, InitialConfig, Mode, NoiseSection,
    Overrides, OutputConfig, ScenarioConfig, DEFAULT_NOISE_DT, DEFAULT_OMEGA, DEFAULT_OUTPUT_DIR,
    DEFAULT_TRAJECTORIES,
};
pub use output::{
    format_f64, read_csv, write_csv, CsvTable, Metadata, MOMENT_COLUMNS, OUTCOME_COLUMNS, STATS_COLUMNS,
    SUMMARY_COLUMNS, TRAJECTORY_COLUMNS, WIENER_COLUMN,
};
pub use run::{
    run_deterministic, run_ensemble_mode, run_figure1, run_stochastic, run_sweep, stats_block, RunReport,
    FIGURE1_GAMMAS, FIGURE1_OMEGA, FIGURE1_SAMPLE_INTERVAL, FIGURE1_T_END,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),

    #[error("numerical error: {0}")]
    Runtime(#[from] crate::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("CSV error in {}: {message}", path.display())]
    Csv { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_INVALID,
            _ => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "collapse-sim", version, about = "Two-level collapse dynamics: deterministic, stochastic and ensemble runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the deterministic non-unitary equation.
    Deterministic(RunArgs),
    /// Simulate one CSL trajectory (stream 0 of the seed).
    Stochastic(RunArgs),
    /// Run an ensemble of CSL trajectories and report outcome statistics.
    Ensemble(RunArgs),
    /// Deterministic runs over a list of couplings.
    Sweep(RunArgs),
    /// Reproduce the four reference trajectories and their summary table.
    Figure1(FigureArgs),
    /// Parse and validate a scenario file without running it.
    Validate {
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file (TOML).
    config: PathBuf,
    #[command(flatten)]
    overrides: OverrideArgs,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Debug, Args)]
struct OverrideArgs {
    /// Base seed of the noise streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Step size of the integrator used by the subcommand.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time of the integrator used by the subcommand.
    #[arg(long)]
    t_end: Option<f64>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides {
            seed: a.seed,
            out_dir: a.out_dir,
            dt: a.dt,
            t_end: a.t_end,
        }
    }
}

fn dispatch(command: Command) -> Result<String, CliError> {
    let (mode, args) = match command {
        Command::Validate { config } => {
            let cfg = load_config(&config, &Overrides::default(), None)?;
            let mode = cfg.mode.map_or("unspecified".to_string(), |m| m.to_string());
            return Ok(format!("{}: valid (mode {mode})\n", config.display()));
        }
        Command::Figure1(a) => {
            let o = Overrides {
                seed: None,
                out_dir: a.out_dir,
                dt: a.dt,
                t_end: a.t_end,
            };
            return Ok(run_figure1(&o)?.text);
        }
        Command::Deterministic(a) => (Mode::Deterministic, a),
        Command::Stochastic(a) => (Mode::Stochastic, a),
        Command::Ensemble(a) => (Mode::Ensemble, a),
        Command::Sweep(a) => (Mode::Sweep, a),
    };
    let cfg = load_config(&args.config, &args.overrides.into(), Some(mode))?;
    let report = match mode {
        Mode::Deterministic => run_deterministic(&cfg)?,
        Mode::Stochastic => run_stochastic(&cfg)?,
        Mode::Ensemble => run_ensemble_mode(&cfg)?,
        Mode::Sweep => run_sweep(&cfg)?,
        Mode::Figure1 => unreachable!("handled above"),
    };
    Ok(report.text)
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_INVALID
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            let _ = write!(stdout, "{text}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.to_string().trim_end());
            e.exit_code()
        }
    }
}
