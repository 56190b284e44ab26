use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hartmann_core::io::{execute, parse_config, Command, EXIT_IO};

#[derive(Parser)]
#[command(name = "hartmann-layer", version, about = "Magnetic boundary-layer solver and estimate checker")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Time-step the configured problem and write diagnostics.
    Run(Common),
    /// Run the randomized inequality suites.
    Check(Common),
    /// Compare runs across regularization parameters.
    Sweep(Common),
    /// Compare twin runs from perturbed initial data.
    Perturb(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Run(a) => (Command::Run, a),
        Sub::Check(a) => (Command::Check, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Perturb(a) => (Command::Perturb, a),
    };
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_IO as u8);
            }
        },
        None => "{}".to_string(),
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO as u8);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    ExitCode::from(execute(command, &cfg, &args.out) as u8)
}
