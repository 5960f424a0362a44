use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subharmonic_cli::{analyze, complete, synth, CliError, Flags};

#[derive(Parser)]
#[command(name = "subharm", version, about = "Growth, limit-set and completeness analysis of subharmonic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    /// Angular grid size (a power of two, at least 16).
    #[arg(long, default_value_t = 256)]
    phi_grid: usize,
    /// Decades in the scaling window.
    #[arg(long, default_value_t = 2.0)]
    t_decades: f64,
    /// Samples per decade in the scaling window.
    #[arg(long, default_value_t = 32)]
    t_per_decade: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Recorded in the report; every computation is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Shared {
    fn flags(&self) -> Result<Flags, CliError> {
        let n = self.phi_grid;
        if n < 16 || !n.is_power_of_two() {
            return Err(CliError::Input(format!("--phi-grid {n} is not a power of two >= 16")));
        }
        if !(self.t_decades.is_finite() && self.t_decades > 0.0) {
            return Err(CliError::Input(format!("--t-decades must be positive, got {}", self.t_decades)));
        }
        if self.t_per_decade == 0 {
            return Err(CliError::Input("--t-per-decade must be positive".into()));
        }
        Ok(Flags { phi_grid: n, t_decades: self.t_decades, t_per_decade: self.t_per_decade, seed: self.seed })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Growth, Jensen-Privalov, indicator and CRG report for a zero set.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        shared: Shared,
    },
    /// Synthesize a zero set for a target indicator pair or lower indicator.
    Synth {
        input: PathBuf,
        #[command(flatten)]
        shared: Shared,
    },
    /// Enclosure classification and completeness verdict for convex bodies.
    Complete {
        input: PathBuf,
        /// Spiral period; repeat for several.
        #[arg(long = "period")]
        periods: Vec<f64>,
        #[command(flatten)]
        shared: Shared,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { input, shared } => {
            analyze::run_analyze(&input, &shared.flags()?, &shared.out)?;
        }
        Command::Synth { input, shared } => {
            synth::run_synthesize(&input, &shared.flags()?, &shared.out)?;
        }
        Command::Complete { input, periods, shared } => {
            complete::run_completeness(&input, &shared.flags()?, &periods, &shared.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("subharm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
