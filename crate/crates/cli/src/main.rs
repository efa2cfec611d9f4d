mod commands;
mod input;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use timelottery::axioms::PaymentMode;
use timelottery::simulate::SimMode;
use timelottery::Approach;

use crate::input::{BinaryArgs, LotteryArgs};

/// Evaluate time lotteries by time-average and ensemble-average growth.
#[derive(Debug, Parser)]
#[command(name = "timelottery", version, about)]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ApproachArg {
    Time,
    Ensemble,
}

impl From<ApproachArg> for Approach {
    fn from(a: ApproachArg) -> Self {
        match a {
            ApproachArg::Time => Approach::Time,
            ApproachArg::Ensemble => Approach::Ensemble,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Sequential,
    Ensemble,
}

impl From<ModeArg> for SimMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sequential => SimMode::Sequential,
            ModeArg::Ensemble => SimMode::Ensemble,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExecArg {
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PaymentsArg {
    Equal,
    Unequal,
}

impl From<PaymentsArg> for PaymentMode {
    fn from(p: PaymentsArg) -> Self {
        match p {
            PaymentsArg::Equal => PaymentMode::Equal,
            PaymentsArg::Unequal => PaymentMode::Unequal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DatasetArg {
    Dejarnette,
    Onay,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Artifact {
    Tables,
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemaArg {
    Rates,
    Lotteries,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Setup {
    Times,
    Amounts,
}

#[derive(Debug, Clone, Args)]
struct Exactness {
    /// Use exact rational arithmetic instead of f64.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Growth rates and Jensen gap of a lottery.
    Eval {
        #[command(flatten)]
        lottery: LotteryArgs,
        #[command(flatten)]
        exact: Exactness,
    },
    /// Risk class of a lottery against its degenerate lottery.
    Classify {
        #[command(flatten)]
        binary: BinaryArgs,
        /// Only this approach (default: both).
        #[arg(long, value_enum)]
        approach: Option<ApproachArg>,
        #[command(flatten)]
        exact: Exactness,
    },
    /// Combined lottery theta*a + (1-theta)*b.
    Mix {
        /// JSON lottery file.
        #[arg(long)]
        a: PathBuf,
        /// JSON lottery file.
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        theta: String,
        #[command(flatten)]
        exact: Exactness,
    },
    /// Monte Carlo estimate of a growth rate.
    Simulate {
        #[command(flatten)]
        lottery: LotteryArgs,
        #[arg(long, value_enum, default_value = "sequential")]
        mode: ModeArg,
        /// Rounds (sequential) or copies (ensemble).
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, env = "TIMELOTTERY_SEED", default_value_t = 42)]
        seed: u64,
        /// Comma-separated counts; emits a CSV convergence series instead.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value = "parallel")]
        exec: ExecArg,
    },
    /// Sampled checks of the vNM axioms for growth-optimal preferences.
    Axioms {
        #[arg(long, value_enum, default_value = "time")]
        approach: ApproachArg,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, env = "TIMELOTTERY_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "unequal")]
        payments: PaymentsArg,
        /// Also search this many random triples for independence violations
        /// under the time approach.
        #[arg(long, value_name = "BUDGET")]
        search: Option<u64>,
        #[command(flatten)]
        exact: Exactness,
    },
    /// Regenerate the growth-rate tables or the regression figure.
    Reproduce {
        #[arg(value_enum)]
        artifact: Artifact,
        #[arg(long, value_enum)]
        dataset: DatasetArg,
        /// text|csv for tables, svg|csv for the figure.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Cross-check a dataset's printed columns against their definitions.
    Audit {
        #[arg(
            long,
            value_enum,
            required_unless_present = "input",
            conflicts_with = "input"
        )]
        dataset: Option<DatasetArg>,
        /// CSV file to audit instead of a shipped dataset.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "rates")]
        schema: SchemaArg,
    },
    /// Choice problem on which the two approaches disagree.
    Design {
        #[arg(value_enum)]
        setup: Setup,
        #[command(flatten)]
        binary: BinaryArgs,
        /// Position of the payment time inside the disagreement interval.
        #[arg(long, default_value = "0.5")]
        placement: String,
        /// Riskless amount as a multiple of dx (default: middle of the window).
        #[arg(long)]
        ratio: Option<String>,
        #[command(flatten)]
        exact: Exactness,
    },
}

/// Command output plus the exit code it implies.
pub struct Report {
    pub body: Vec<u8>,
    pub code: u8,
}

impl Report {
    pub fn ok(body: impl Into<Vec<u8>>) -> Self {
        Self {
            body: body.into(),
            code: 0,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let report = match commands::run(cli.command) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &report.body).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout()
            .write_all(&report.body)
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    ExitCode::from(report.code)
}
