//! rac-lab: reproduces the random access code benchmarks and exposes each
//! engine on the command line.
//!
//! Exit codes: 0 success, 2 contract violation, 3 work-cap refusal, 1 other.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rac_core::error::Error;

use output::Format;

#[derive(Parser)]
#[command(name = "rac-lab", version, about = "Quantum random access code benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// All five benchmark rows: classical, qudit and entangled values.
    Table1 {
        /// Override the per-row restart count.
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// The explicit 2^(3)→1 entanglement-assisted strategy.
    EaracExplicit {
        #[command(flatten)]
        common: Common,
    },
    /// Prepare-and-measure value; n = 2 uses the closed-form protocol.
    Qcrac {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exact classical optimum by enumeration.
    Classical {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        common: Common,
    },
    /// See-saw lower bound on the entanglement-assisted value.
    Seesaw {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Two copies of the explicit code concatenated into a 4^(3)→1 code.
    Concat {
        #[command(flatten)]
        common: Common,
    },
    /// Recompute the value realized by a report's witness, or by a bare
    /// strategy or protocol file.
    Audit {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("RAC_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = match raw.trim().parse() {
        Ok(t) if t > 0 => t,
        _ => return Err(Error::Contract(format!("RAC_LAB_THREADS must be a positive integer, got {raw:?}")).into()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring worker threads")
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let (reports, common, as_list) = match cli.command {
        Command::Table1 { restarts, common } => (commands::table1(restarts, common.seed)?, common, true),
        Command::EaracExplicit { common } => (vec![commands::earac_explicit(common.seed)?], common, false),
        Command::Qcrac { n, d, restarts, common } => {
            (vec![commands::qcrac(n, d, restarts, common.seed)?], common, false)
        }
        Command::Classical { n, d, common } => (vec![commands::classical(n, d, common.seed)?], common, false),
        Command::Seesaw { n, d, restarts, common } => {
            (vec![commands::seesaw_cmd(n, d, restarts, common.seed)?], common, false)
        }
        Command::Concat { common } => (vec![commands::concat(common.seed)?], common, false),
        Command::Audit { input, common } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            (vec![commands::audit(&text, common.seed)?], common, false)
        }
    };
    let text = output::render(&reports, common.format, as_list);
    match common.out {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_too_large() => 3,
        Some(e) if e.is_contract_violation() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("rac-lab: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
