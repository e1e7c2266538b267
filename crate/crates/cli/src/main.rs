use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ucat_cli::commands::{self, Failure};

/// Minimal unimodal decompositions of densities on metric trees.
///
/// Exit status: 0 success, 1 failed check, 2 bad input, 3 oracle bound exceeded.
#[derive(Parser)]
#[command(name = "ucat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an instance into the fewest unimodal components.
    Decompose {
        /// Instance document, or `-` for standard input.
        input: PathBuf,
        /// Write the decomposition here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write a DOT rendering of the decomposition.
        #[arg(long)]
        render: Option<PathBuf>,
        /// Print one JSON line per greedy round on standard error.
        #[arg(long)]
        trace: bool,
    },
    /// Print the unimodal category of an instance.
    Ucat { input: PathBuf },
    /// Validate a decomposition against its instance.
    Check {
        input: PathBuf,
        decomposition: PathBuf,
    },
    /// Brute-force the unimodal category (small trees only).
    Oracle {
        input: PathBuf,
        /// Give up (exit 3) if more components than this would be needed.
        #[arg(long, default_value_t = 5)]
        max_k: usize,
    },
    /// Sweep from one vertex and print the swept part and the remainder.
    Sweep {
        input: PathBuf,
        #[arg(long)]
        vertex: String,
    },
    /// Print a seeded random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Upper bound on the vertex count; the actual count is drawn from 1..=N.
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 4)]
        max_value: u64,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    match cli.command {
        Command::Decompose {
            input,
            output,
            render,
            trace,
        } => commands::decompose_cmd(
            &input,
            output.as_deref(),
            render.as_deref(),
            trace,
            &mut out,
            &mut err,
        ),
        Command::Ucat { input } => commands::ucat_cmd(&input, &mut out),
        Command::Check {
            input,
            decomposition,
        } => commands::check_cmd(&input, &decomposition, &mut out, &mut err),
        Command::Oracle { input, max_k } => commands::oracle_cmd(&input, max_k, &mut out, &mut err),
        Command::Sweep { input, vertex } => commands::sweep_cmd(&input, &vertex, &mut out),
        Command::Gen {
            seed,
            vertices,
            max_value,
        } => commands::gen_cmd(seed, vertices, max_value, &mut out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, Failure::Check) {
                eprintln!("ucat: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
