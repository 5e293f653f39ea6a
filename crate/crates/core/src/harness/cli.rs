//! Argument parsing and exit codes: 0 ok, 1 I/O or format error, 2 config
//! error, 3 solver failure, 4 acceptance failure.

use super::commands::{self, CommandResult, Outcome};
use super::RunConfig;
use crate::verify::Level;
use crate::Error;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rotor-channels", version, about = "Koopman and quantum channels of coupled kicked rotors")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set system.b=0.5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output root (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Run seed (overrides `solver.seed`).
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, value_name = "INT")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the classical or quantum channel, plus ring radii.
    Spectrum,
    /// Largest non-trivial eigenvalue over `task.alphas`.
    Sweep,
    /// Phase-space rasters of selected eigenmodes.
    Modes,
    /// Finite-time stability exponent field.
    Ftse,
    /// Single-ring radii and entangling power over `task.sizes`.
    Radii,
    /// Hermitian submatrix bound on the largest non-trivial eigenvalue.
    Submatrix,
    /// Two-point correlations under repeated channel steps.
    Correlations,
    /// Run the acceptance suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
        /// Golden raster hashes to compare against.
        #[arg(long, value_name = "PATH")]
        golden: Option<PathBuf>,
        /// Run only these criteria (repeatable), e.g. `--only 3 --only golden`.
        #[arg(long, value_name = "ID")]
        only: Vec<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Sweep => "sweep",
            Command::Modes => "modes",
            Command::Ftse => "ftse",
            Command::Radii => "radii",
            Command::Submatrix => "submatrix",
            Command::Correlations => "correlations",
            Command::Verify { .. } => "verify",
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidParameter(_) => EXIT_CONFIG,
        Error::Solver(_) | Error::DimensionTooLarge { .. } => EXIT_SOLVER,
        Error::Format(_) | Error::Io(_) | Error::Json(_) => EXIT_IO,
    }
}

/// Loads the configuration with the command-line overrides folded in.
pub fn load_config(cli: &Cli) -> crate::Result<RunConfig> {
    let mut sets = cli.set.clone();
    if let Some(out) = &cli.out {
        sets.push(format!("output.dir={}", toml::Value::String(out.display().to_string())));
    }
    if let Some(seed) = cli.seed {
        sets.push(format!("solver.seed={seed}"));
    }
    RunConfig::load(cli.config.as_deref(), &sets)
}

pub fn execute(cli: &Cli) -> crate::Result<CommandResult> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::Modes => commands::modes(&cfg),
        Command::Ftse => commands::ftse(&cfg),
        Command::Radii => commands::radii(&cfg),
        Command::Submatrix => commands::submatrix(&cfg),
        Command::Correlations => commands::correlations(&cfg),
        Command::Verify { level, golden, only } => commands::verify(&cfg, *level, golden.clone(), only.clone()),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    faer::set_global_parallelism(faer::Par::Seq);
    if let Some(j) = cli.jobs {
        // Fails only if the pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match execute(&cli) {
        Ok(r) => {
            println!("{}", r.run_dir.display());
            match r.outcome {
                Outcome::Ok => EXIT_OK,
                Outcome::SolverFailures(n) => {
                    eprintln!("{}: {n} rows failed", cli.command.name());
                    EXIT_SOLVER
                }
                Outcome::AcceptanceFailures(n) => {
                    eprintln!("verify: {n} criteria failed");
                    EXIT_ACCEPTANCE
                }
            }
        }
        Err(e) => {
            eprintln!("{}: {e}", cli.command.name());
            exit_code(&e)
        }
    }
}
