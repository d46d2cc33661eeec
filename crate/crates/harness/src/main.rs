use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use treeprep::bench::Suite;
use treeprep::commands::{self, Overrides};
use treeprep::HarnessError;

#[derive(Parser)]
#[command(name = "treeprep", version, about = "Tree-surrogate variational state preparation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunFlags {
    /// Output directory (default: $TREEPREP_OUT/<name>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Zero all wall-clock fields so artifacts are byte-reproducible.
    #[arg(long)]
    deterministic: bool,
}

impl RunFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            deterministic: self.deterministic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write summary, curve, event log, and QASM.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a benchmark suite (q1, q2, q3) and write per-cell tables.
    Bench {
        #[arg(long)]
        suite: String,
        /// Config whose `[run]` section provides the base settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Target utilities.
    Target {
        #[command(subcommand)]
        action: TargetCommand,
    },
    /// Compute diagnostics from a run directory's event log.
    Diag {
        /// Run directory holding events.jsonl; outputs are written there.
        #[arg(long)]
        out: PathBuf,
        /// Event log path, if not `<out>/events.jsonl`.
        #[arg(long)]
        events: Option<PathBuf>,
        /// Experiment config supplying diagnostics options.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TargetCommand {
    /// Generate a target and write its distribution and circuit.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Synth { config, flags } => {
            let out = commands::synth(&config, &flags.overrides())?;
            println!("wrote {}", out.display());
        }
        Command::Bench {
            suite,
            config,
            flags,
        } => {
            let suite: Suite = suite.parse()?;
            let (out, table) = commands::bench(suite, config.as_deref(), &flags.overrides())?;
            print!("{table}");
            println!("wrote {}", out.display());
        }
        Command::Target {
            action: TargetCommand::Gen { config, out },
        } => {
            let ov = Overrides {
                out,
                ..Overrides::default()
            };
            let out = commands::target_gen(&config, &ov)?;
            println!("wrote {}", out.display());
        }
        Command::Diag {
            out,
            events,
            config,
        } => {
            let out = commands::diag(&out, events.as_deref(), config.as_deref())?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
