//! `nowcast`: single nowcasts, backtests and accuracy tables.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage or validation
//! failure.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nowcast_core::hp::MONTHLY_LAMBDA;
use nowcast_core::synthetic::SHIPPED_SEED;
use nowcast_core::{Day, QuarterIndex, SyntheticConfig, TableLayout, ThetaInput, WindowMode};

use commands::{Classify, CmdResult, Failure, NowcastPaths};
use manifest::NowcastRun;

#[derive(Parser)]
#[command(name = "nowcast", version, about = "Bridge-equation GDP nowcasts", args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    nowcast: CellArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Nowcast one quarter at one day of the quarter (the default command).
    Nowcast(CellArgs),
    /// Run the pseudo-real-time backtest described by a config file.
    Backtest {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an accuracy table from a backtest report.
    Table {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        layout: Layout,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a synthetic dataset generated from the model-1 equation.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = SHIPPED_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        noise: f64,
        #[arg(long, default_value = "1995Q1")]
        start: QuarterIndex,
        #[arg(long, default_value = "2019Q4")]
        end: QuarterIndex,
    },
    /// Print the six estimated bridge equations for one cell.
    Coefficients(CellArgs),
    /// Re-run the command recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CellArgs {
    /// Long-format CSV: period,series_id,value.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Release calendar TOML; the built-in calendar when omitted.
    #[arg(long)]
    calendar: Option<PathBuf>,
    /// Extra series metadata layered over the standard schema.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Target quarter, e.g. 2019Q4.
    #[arg(long)]
    quarter: Option<QuarterIndex>,
    /// Day of the quarter: 0, 30, 60, 90 or 100.
    #[arg(long)]
    day: Option<Day>,
    #[arg(long, default_value = "1996Q1")]
    sample_start: QuarterIndex,
    /// Rolling window length in quarters; expanding when omitted.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = MONTHLY_LAMBDA)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = ThetaArg::Growth)]
    theta_input: ThetaArg,
    /// Also error-correct the Theta benchmark.
    #[arg(long)]
    theta_correction: bool,
    /// Check every snapshot against the release calendar.
    #[arg(long)]
    audit: bool,
    /// Directory for the structured output and manifest.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Table4,
    Table5,
    Table6,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaArg {
    Growth,
    Level,
}

impl CellArgs {
    fn resolve(&self) -> CmdResult<(NowcastPaths<'_>, NowcastRun)> {
        let missing = |flag: &str| Failure::Usage(anyhow::anyhow!("missing required argument --{flag}"));
        let data = self.data.as_deref().ok_or_else(|| missing("data"))?;
        let quarter = self.quarter.ok_or_else(|| missing("quarter"))?;
        let day = self.day.ok_or_else(|| missing("day"))?;
        let window = match self.window {
            Some(n) => WindowMode::Fixed(n),
            None => WindowMode::Expanding,
        };
        let run = NowcastRun {
            quarter,
            day,
            sample_start: self.sample_start,
            lambda: self.lambda,
            window,
            theta_input: match self.theta_input {
                ThetaArg::Growth => ThetaInput::Growth,
                ThetaArg::Level => ThetaInput::Level,
            },
            theta_error_correction: self.theta_correction,
            audit: self.audit,
        };
        commands::nowcast_options(&run).validate().usage()?;
        let paths =
            NowcastPaths { data, calendar: self.calendar.as_deref(), schema: self.schema.as_deref(), out: &self.out };
        Ok((paths, run))
    }
}

fn run(cli: Cli) -> CmdResult<String> {
    match cli.command {
        None => {
            let (paths, run) = cli.nowcast.resolve()?;
            commands::nowcast(&paths, &run)
        }
        Some(Command::Nowcast(args)) => {
            let (paths, run) = args.resolve()?;
            commands::nowcast(&paths, &run)
        }
        Some(Command::Coefficients(args)) => {
            let (paths, run) = args.resolve()?;
            commands::coefficients(&paths, &run)
        }
        Some(Command::Backtest { config, out }) => {
            let cfg = commands::read_run_config(&config)?;
            let out = out
                .or_else(|| cfg.output.clone())
                .ok_or_else(|| Failure::Usage(anyhow::anyhow!("no output directory: pass --out or set `output`")))?;
            commands::backtest(&cfg, Some(&config), &out)
        }
        Some(Command::Table { report, layout, format }) => {
            let layout = match layout {
                Layout::Table4 => TableLayout::Table4,
                Layout::Table5 => TableLayout::Table5,
                Layout::Table6 => TableLayout::Table6,
            };
            commands::table(&report, layout, format == Format::Csv)
        }
        Some(Command::Synth { out, seed, noise, start, end }) => {
            commands::synth(&SyntheticConfig { seed, start, end, noise }, &out)
        }
        Some(Command::Replay { manifest, out }) => commands::replay(&manifest, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
