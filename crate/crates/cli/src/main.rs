//! `vreal`: simulate sessions, score logs and analyse questionnaire data.

mod error;
mod files;
mod manifest;
mod score;
mod simulate;
mod vrnq;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vreal_core::bayes::{Direction, DEFAULT_PRIOR_SCALE};
use vreal_core::vrnq::Tier;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Less,
    Greater,
    TwoSided,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Less => Direction::ALess,
            DirectionArg::Greater => Direction::AGreater,
            DirectionArg::TwoSided => Direction::TwoSided,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TierArg {
    Minimum,
    Parsimonious,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Self {
        match t {
            TierArg::Minimum => Tier::Minimum,
            TierArg::Parsimonious => Tier::Parsimonious,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "vreal", version, about = "Simulate, score and evaluate VR everyday-cognition sessions")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one session or a cohort and write logs, reports and a manifest.
    Simulate {
        /// Preset (perfect, null, typical) or path to a profile JSON file.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of sessions; seeds are `seed`, `seed + 1`, ...
        #[arg(long, default_value_t = 1)]
        cohort: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Run the cohort on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Replay and score a session log.
    Score {
        log: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for report.txt, scorecard.json and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Questionnaire scoring and version comparison.
    Vrnq {
        #[command(subcommand)]
        command: VrnqCommand,
    },
}

#[derive(Debug, Subcommand)]
enum VrnqCommand {
    /// Score a cohort and check the cut-offs.
    Score {
        /// Domain map JSON (item numbers per domain).
        #[arg(long)]
        domains: PathBuf,
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = TierArg::Parsimonious)]
        tier: TierArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired Bayesian t-tests between two versions, matched by participant id.
    Compare {
        #[arg(long)]
        domains: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = DirectionArg::Less)]
        direction: DirectionArg,
        #[arg(long, default_value_t = DEFAULT_PRIOR_SCALE)]
        prior_scale: f64,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Simulate { profile, seed, cohort, config, out, sequential } => simulate::run(simulate::SimulateArgs {
            profile: &profile,
            seed,
            cohort,
            config: config.as_deref(),
            out: &out,
            sequential,
            format: cli.format,
        }),
        Command::Score { log, config, out } => score::run(&log, config.as_deref(), out.as_deref(), cli.format),
        Command::Vrnq { command: VrnqCommand::Score { domains, csv, tier, out } } => {
            vrnq::score(&domains, &csv, tier.into(), out.as_deref(), cli.format)
        }
        Command::Vrnq { command: VrnqCommand::Compare { domains, a, b, direction, prior_scale, csv, out } } => {
            vrnq::compare_cohorts(vrnq::CompareArgs {
                domains: &domains,
                a: &a,
                b: &b,
                direction: direction.into(),
                prior_scale,
                csv_out: csv.as_deref(),
                out: out.as_deref(),
                format: cli.format,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("vreal: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
