mod commands;
mod format;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use instakernel::Limits;

use commands::{CompressArgs, GenKind, Mode};

#[derive(Debug, Parser)]
#[command(
    name = "instakernel",
    version,
    about = "Shrink the numbers in integer programs without changing their solutions"
)]
struct Cli {
    /// Cap on every enumeration, search and table size.
    #[arg(long, global = true, env = "INSTAKERNEL_BUDGET")]
    budget: Option<u64>,
    /// Seed for `generate`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Machine-readable JSON output (the default).
    #[arg(long, global = true, conflicts_with = "human")]
    json: bool,
    /// `key: value` lines instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replace a vector by a small one that orders all short differences the same way.
    ReduceVector {
        /// Comma-separated entries.
        #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
        w: Option<String>,
        /// A JSON file `{"w": [...], "delta": "..."}`.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long)]
        delta: Option<String>,
        /// Check every difference vector exhaustively.
        #[arg(long)]
        verify: bool,
    },
    /// Write an equivalent instance with small coefficients.
    Compress {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Static)]
        mode: Mode,
        /// Box radius for static reductions.
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        verify: bool,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Where the pre-solution goes; defaults to `<out>.pre.json`.
        #[arg(long, value_name = "FILE")]
        pre_out: Option<PathBuf>,
    },
    /// Compare an instance with its reduction by brute force.
    Verify {
        #[arg(long, value_name = "FILE")]
        original: PathBuf,
        #[arg(long, value_name = "FILE")]
        reduced: PathBuf,
        #[arg(long, value_name = "FILE")]
        pre: Option<PathBuf>,
    },
    /// Write a random instance.
    Generate {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 6)]
        size: usize,
        /// Coefficient size for the number-heavy kinds.
        #[arg(long, default_value_t = 64)]
        bits: u64,
        /// Defaults to standard output.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    let core = e
        .chain()
        .find_map(|c| c.downcast_ref::<instakernel::Error>());
    match core {
        Some(ie) if ie.is_budget() => 2,
        Some(instakernel::Error::Inconsistent(_)) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8> {
    let limits = cli.budget.map_or_else(Limits::default, Limits::uniform);
    let human = cli.human;
    match cli.command {
        Command::ReduceVector {
            w,
            input,
            delta,
            verify,
        } => {
            let (rec, code) = commands::reduce_vector_cmd(
                input.as_deref(),
                w.as_deref(),
                delta.as_deref(),
                verify,
                &limits,
            )?;
            print!("{}", report::render(&rec, human));
            Ok(code)
        }
        Command::Compress {
            input,
            mode,
            u,
            verify,
            out,
            pre_out,
        } => {
            let args = CompressArgs {
                input: &input,
                mode,
                u: u.as_deref(),
                verify,
                out: &out,
                pre_out: pre_out.as_deref(),
            };
            let (rep, code) = commands::compress_cmd(&args, &limits)?;
            print!("{}", report::render(&rep, human));
            Ok(code)
        }
        Command::Verify {
            original,
            reduced,
            pre,
        } => {
            let (rep, code) = commands::verify_cmd(&original, &reduced, pre.as_deref(), &limits)?;
            print!("{}", report::render(&rep, human));
            Ok(code)
        }
        Command::Generate {
            kind,
            size,
            bits,
            out,
        } => {
            let inst = commands::generate(kind, size, bits, cli.seed)?;
            let doc = format::Document::Instance(inst);
            match out {
                Some(path) => format::write_document(&path, &doc)?,
                None => print!("{}", format::to_json(&doc)?),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
