use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anisolog::cli::{self, CommandOutput, SimulateArgs};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "anisolog", version, about = "Equilibrium measures of anisotropic log-gases")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the angular profile of the configured kernel.
    Analyze { config: PathBuf },
    /// Predict the minimiser and scan its Euler-Lagrange residuals.
    Solve { config: PathBuf },
    /// Minimise the discrete n-particle energy.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for particles.csv, iterations.csv and moments.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the Euler-Lagrange residuals of a stored prediction.
    Verify { config: PathBuf, prediction: PathBuf },
    /// Compare both sides of the energy identity on two Gaussian blobs.
    Parseval { config: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out: CommandOutput = match args.command {
        Command::Analyze { config } => cli::cmd_analyze(&config),
        Command::Solve { config } => cli::cmd_solve(&config),
        Command::Simulate { config, n, seed, out } => {
            cli::cmd_simulate(&config, &SimulateArgs { n, seed, out })
        }
        Command::Verify { config, prediction } => cli::cmd_verify(&config, &prediction),
        Command::Parseval { config } => cli::cmd_parseval(&config),
    };
    if let Some(report) = &out.report {
        let text = serde_json::to_string_pretty(report).unwrap_or_default();
        // A closed stdout (e.g. a pipe into `head`) is not an error worth reporting.
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    }
    if let Some(msg) = &out.message {
        let _ = writeln!(std::io::stderr().lock(), "anisolog: {msg}");
    }
    ExitCode::from(out.code as u8)
}
