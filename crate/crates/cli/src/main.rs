//! `episcale`: simulate and analyse discrete-time SEIRS metapopulation models
//! with separated movement and disease time scales.
//!
//! Exit codes: `0` success, `1` invalid input, `2` hypothesis or numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod failure;
mod output;
mod scenario;

use failure::Failure;
use output::OutputSink;
use scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "episcale",
    version,
    about = "Discrete-time SEIRS metapopulation simulation and analysis"
)]
struct Cli {
    /// Write output documents as files into this directory instead of stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the coupled two-time-scale simulation and emit the trajectory.
    Simulate {
        /// Scenario file (TOML).
        scenario: PathBuf,
    },
    /// Per-patch reproduction numbers by two routes, plus the aggregated one.
    R0 {
        /// Scenario file (TOML).
        scenario: PathBuf,
    },
    /// Aggregated-model coefficients, reproduction number, and disease-free state.
    Reduce {
        /// Scenario file (TOML).
        scenario: PathBuf,
    },
    /// Check convergence of full-system fixed points to the lifted aggregated one.
    VerifyK {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Fast-step counts to test.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
        ks: Vec<u32>,
        /// Solver threads; the output does not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Sweep the stationary-profile square for the eradication region (two patches).
    Region {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Grid points per axis.
        #[arg(long, default_value_t = 201)]
        resolution: usize,
    },
    /// Classify long-run behaviour of the coupled system and isolated patches.
    Classify {
        /// Scenario file (TOML).
        scenario: PathBuf,
    },
    /// Parse and validate a scenario file, reporting a summary.
    Validate {
        /// Scenario file (TOML).
        scenario: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let sink = OutputSink::new(cli.out.clone())?;
    match &cli.command {
        Command::Simulate { scenario } => {
            commands::simulate::run(&Scenario::load(scenario)?, &sink)
        }
        Command::R0 { scenario } => commands::r0::run(&Scenario::load(scenario)?, &sink),
        Command::Reduce { scenario } => commands::reduce::run(&Scenario::load(scenario)?, &sink),
        Command::VerifyK {
            scenario,
            ks,
            workers,
        } => commands::verify_k::run(&Scenario::load(scenario)?, ks, *workers, &sink),
        Command::Region {
            scenario,
            resolution,
        } => commands::region::run(&Scenario::load(scenario)?, *resolution, &sink),
        Command::Classify { scenario } => {
            commands::classify::run(&Scenario::load(scenario)?, &sink)
        }
        Command::Validate { scenario } => {
            commands::validate::run(&Scenario::load(scenario)?, &sink)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // `--help` and `--version` arrive as non-error "errors"; keep
            // their exit code 0 and route real usage errors to code 1.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
