mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use iterdiv::extremal::Objective;

/// Extremal values of d(n), d(d(n)) and ω(d(n)).
#[derive(Debug, Parser)]
#[command(name = "iterdiv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of text or CSV.
    #[arg(long, global = true)]
    json: bool,

    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The constant c = sqrt(8 Σ ln²(1 + 1/j)) to a certified number of places.
    Constant {
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
    /// The smallest integer with exactly N divisors.
    Mn {
        #[arg(value_name = "N")]
        n: u64,
        /// Search without the structural pruning rule.
        #[arg(long)]
        no_pruning: bool,
    },
    /// Best value of an objective over n <= 10^log10x.
    Extremal {
        #[arg(long, allow_hyphen_values = true)]
        log10x: f64,
        #[arg(long, value_enum)]
        obj: Obj,
        #[arg(long, value_enum, default_value_t = Mode::Oracle)]
        mode: Mode,
        /// Node limit for the exact search.
        #[arg(long, default_value_t = commands::DEFAULT_NODE_LIMIT)]
        node_limit: u64,
    },
    /// Randomized checks of the lemma inequalities.
    Verify {
        /// lemma2, lemma3a, lemma3b, lemma4 or all
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convergence table for the natural-log budgets listed in FILE.
    Table {
        /// One budget ln x per line; blank lines and '#' comments ignored.
        #[arg(value_name = "FILE")]
        budgets: PathBuf,
        /// Node limit for each oracle run; 0 skips the oracle columns.
        #[arg(long, default_value_t = commands::TABLE_NODE_LIMIT)]
        node_limit: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Obj {
    D,
    Dd,
    Omegad,
}

impl From<Obj> for Objective {
    fn from(o: Obj) -> Self {
        match o {
            Obj::D => Objective::LogD,
            Obj::Dd => Objective::LogDd,
            Obj::Omegad => Objective::OmegaD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Construct,
    Oracle,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = output::Format { json: cli.json };
    let result = match cli.command {
        Command::Constant { digits } => commands::constant(digits, format),
        Command::Mn { n, no_pruning } => commands::mn(n, !no_pruning, format),
        Command::Extremal { log10x, obj, mode, node_limit } => {
            commands::extremal(log10x, obj.into(), mode, node_limit, format)
        }
        Command::Verify { suite, trials, seed } => commands::verify(&suite, trials, seed, format),
        Command::Table { budgets, node_limit } => commands::table(&budgets, node_limit, format),
    };
    match result {
        Ok(report) => {
            if let Err(e) = output::emit(&report.text, cli.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(report.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
