//! `qbc`: command-line front end for the qbc-core toolkit.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "qbc", version, about = "Quantum bit commitment: cheat solver, concealing tables, Monte Carlo runs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the master seed of experiment inputs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo runs; 1 forces the sequential path.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Fail with exit 4 when any |z| exceeds 4.
    #[arg(long, global = true)]
    pub strict: bool,
    /// More detail on stderr (timings).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal entanglement cheat for a pair of commitment ensembles.
    Cheat {
        /// JSON file with `e0` and `e1` ensembles.
        input: PathBuf,
    },
    /// Closed-form concealing probabilities and their binomial bounds.
    Concealing {
        /// Odd sequence lengths.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Largest eigenvalue of the single-qubit difference operator.
        #[arg(long, default_value_t = 1.0)]
        lambda_plus: f64,
    },
    /// Run an experiment spec (or the bundled swap example) and compare
    /// every estimate with its closed form.
    Simulate {
        input: PathBuf,
        /// Override the trial count.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Adam's bit-change rate of an experiment spec across sequence sizes.
    Attack {
        input: PathBuf,
        /// `n` for single-slot protocols, `N` otherwise.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Run a parameter sweep, optionally resuming from a checkpoint.
    Sweep {
        input: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run the built-in invariant suites and validate fixture files.
    Verify {
        /// Only run suites of this module.
        #[arg(long)]
        filter: Option<String>,
        /// Fixture files to validate before the suites run.
        fixtures: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let g = &cli.global;
    let result = match cli.command {
        Command::Cheat { input } => commands::cheat(g, &input),
        Command::Concealing { n, lambda_plus } => commands::concealing(g, &n, lambda_plus),
        Command::Simulate { input, trials } => commands::simulate(g, &input, trials),
        Command::Attack { input, sizes, trials } => commands::attack(g, &input, &sizes, trials),
        Command::Sweep { input, checkpoint } => commands::sweep(g, &input, checkpoint.as_deref()),
        Command::Verify { filter, fixtures } => commands::verify(g, filter.as_deref(), &fixtures),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
