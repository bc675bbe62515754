//! Command-line front end: argument and config handling, the four
//! subcommands and table output. SNRs are given in dB here and converted to
//! linear scale before reaching the library.

pub mod commands;
pub mod parse;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use parse::{parse_config, parse_f64_list, parse_schemes, Format, ParseError, Settings};
pub use table::{Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {source}")]
    Config { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Channel(#[from] twrc::channel::ChannelError),
    #[error(transparent)]
    Region(#[from] twrc::region::RegionError),
    #[error(transparent)]
    Broadcast(#[from] twrc::broadcast::BcError),
    #[error(transparent)]
    Sim(#[from] twrc::sim::SimError),
}

impl CliError {
    /// 2 for bad invocations, 1 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "twrc", version, about = "Rate regions, sum-rates, delays and broadcast gaps for two-way relaying")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Boundary polylines of the achievable rate regions at one relay position.
    Region,
    /// Mean maximum sum-rate over fading draws against relay position.
    MsrSweep,
    /// Mean bit delay of the queue-weighted scheduler against arrival rate.
    Delay,
    /// Gap between the superimposed-XOR broadcast region and the capacity corner.
    BcGap,
}

/// A parsed number list. Wrapped so clap treats the flag as one value.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberList(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeList(pub Vec<twrc::Scheme>);

fn number_list(s: &str) -> Result<NumberList, ParseError> {
    parse_f64_list(s).map(NumberList)
}

fn scheme_list(s: &str) -> Result<SchemeList, ParseError> {
    parse_schemes(s).map(SchemeList)
}

/// Flags shared by every subcommand; each also works as a config key.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Relay x position; a list for msr-sweep.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = number_list)]
    pub x: Option<NumberList>,
    /// Relay y position.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub y: Option<f64>,
    /// Transmit power in dB; a list for bc-gap.
    #[arg(long = "p-db", global = true, allow_hyphen_values = true, value_parser = number_list)]
    pub p_db: Option<NumberList>,
    /// Path-loss constant.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Path-loss exponent.
    #[arg(long = "n-exp", global = true)]
    pub n_exp: Option<f64>,
    /// Comma-separated schemes, or `all`.
    #[arg(long, global = true, value_parser = scheme_list)]
    pub schemes: Option<SchemeList>,
    /// Number of power splits sampled on [0, 1].
    #[arg(long = "theta-grid", global = true)]
    pub theta_grid: Option<usize>,
    /// Number of boundary directions.
    #[arg(long, global = true)]
    pub dirs: Option<usize>,
    /// Fading draws per point (msr-sweep) or seeds per point (delay).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Packet arrival rates per slot.
    #[arg(long, global = true, value_parser = number_list)]
    pub rho: Option<NumberList>,
    /// Bits per packet.
    #[arg(long = "packet-bits", global = true)]
    pub packet_bits: Option<u32>,
    /// Slots per queue run.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key = value file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Opts {
    fn settings(self) -> Settings {
        Settings {
            x: self.x.map(|l| l.0),
            y: self.y,
            p_db: self.p_db.map(|l| l.0),
            c: self.c,
            n_exp: self.n_exp,
            schemes: self.schemes.map(|l| l.0),
            theta_grid: self.theta_grid,
            dirs: self.dirs,
            trials: self.trials,
            seed: self.seed,
            rho: self.rho.map(|l| l.0),
            packet_bits: self.packet_bits,
            horizon: self.horizon,
            out: self.out,
            format: self.format,
        }
    }
}

/// Flag values layered over the config file, if one was given.
pub fn resolve(opts: Opts) -> Result<Settings, CliError> {
    let file = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            parse_config(&text).map_err(|source| CliError::Config { path: path.clone(), source })?
        }
        None => Settings::default(),
    };
    Ok(file.overridden_by(opts.settings()))
}

pub fn execute(command: Command, settings: &Settings) -> Result<Table, CliError> {
    match command {
        Command::Region => commands::region(settings),
        Command::MsrSweep => commands::msr_sweep(settings),
        Command::Delay => commands::delay(settings),
        Command::BcGap => commands::bc_gap(settings),
    }
}

pub fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

/// Runs a parsed invocation and writes its output.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let settings = resolve(cli.opts)?;
    let table = execute(cli.command, &settings)?;
    let text = render(&table, settings.format.unwrap_or_default());
    match &settings.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
