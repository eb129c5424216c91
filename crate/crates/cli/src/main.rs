use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qhpo_cli::{run, Command, FlagDefaults, RunConfig};

/// Hyperparameter optimization through a quantum Fourier surrogate.
#[derive(Debug, Parser)]
#[command(name = "qhpo", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// TOML run configuration. Values in the file override the flags below.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Output directory. QHPO_OUTPUT_DIR overrides both this flag and the file.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Global seed for every stage that does not set its own.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print progress to stderr; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Score sampled hyperparameters and write the surrogate training table.
    Generate,
    /// Run the full pipeline against a classical baseline and write the report.
    Optimize,
    /// Run the grid or random baseline alone.
    Baseline,
    /// Evaluate a trained surrogate on a dense grid over one or two encoded axes.
    Surface,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::Generate => Command::Generate,
        Sub::Optimize => Command::Optimize,
        Sub::Baseline => Command::Baseline,
        Sub::Surface => Command::Surface,
    };
    let Some(path) = cli.config else {
        eprintln!("error: --config <FILE> is required");
        return ExitCode::from(1);
    };
    let flags = FlagDefaults { seed: cli.seed, output_dir: cli.output_dir, threads: cli.threads };
    let result = RunConfig::load(&path, &flags).and_then(|config| run(command, &config, cli.verbose));
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
