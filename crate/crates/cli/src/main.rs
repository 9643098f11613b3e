/// `println!` that ignores a closed stdout (e.g. when piped into `head`).
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use bhcast_core::lstm::Profile;
use bhcast_core::pipeline::{Approach, Method};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;
use error::CliError;

/// Busy-hour cellular traffic forecasting.
///
/// Exit codes: 0 success, 1 invalid configuration or input, 2 runtime failure
/// (including any failed grid cell).
#[derive(Debug, Parser)]
#[command(name = "bhcast", version)]
struct Cli {
    /// Run configuration file (TOML); defaults apply to anything it omits.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for every stochastic step; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Model size preset; overrides the config.
    #[arg(long, global = true, value_enum)]
    profile: Option<ProfileArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Paper,
    Test,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Ad,
    Sa,
    Lstm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ApproachArg {
    Cu,
    Ca,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Traffic CSV; overrides `dataset` in the config.
    #[arg(long, value_name = "CSV")]
    data: Option<PathBuf>,

    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a traffic CSV and print a summary.
    Ingest {
        /// CSV with header cell_id,timestamp_iso8601_utc,dl_bytes.
        path: PathBuf,
        /// Reject duplicate (cell, hour) rows.
        #[arg(long)]
        strict: bool,
    },
    /// Cluster cells by weekly signature; writes clusters.csv and clusters.json.
    Cluster {
        #[command(flatten)]
        data: DataArgs,
        /// Fixed number of clusters instead of silhouette selection.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Forecast one grid cell and score it against the test window.
    Forecast {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "sa")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "cu")]
        approach: ApproachArg,
        /// Training length in months.
        #[arg(long, default_value_t = 1)]
        tl: u32,
        /// Look-ahead in months.
        #[arg(long, default_value_t = 1)]
        la: u32,
        /// Last training day (YYYY-MM-DD).
        #[arg(long)]
        train_end: Option<NaiveDate>,
    },
    /// Run the configured method x approach x TL x LA grid; writes
    /// report.csv, forecasts/*.csv and summary.json.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Generate a synthetic scenario; writes traffic.csv and labels.csv.
    Synth {
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Days to generate; overrides `synth.days`.
        #[arg(long)]
        days: Option<usize>,
        /// First day (YYYY-MM-DD); overrides `synth.start`.
        #[arg(long)]
        start: Option<NaiveDate>,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(p) = cli.profile {
        config.profile = match p {
            ProfileArg::Paper => Profile::Paper,
            ProfileArg::Test => Profile::Test,
        };
    }
    match &cli.command {
        Command::Cluster { data, .. } | Command::Forecast { data, .. } | Command::Evaluate { data } => {
            if let Some(d) = &data.data {
                config.dataset = Some(d.clone());
            }
            if let Some(o) = &data.out {
                config.output_dir = o.clone();
            }
        }
        Command::Synth { out, days, start } => {
            if let Some(o) = out {
                config.output_dir = o.clone();
            }
            if let Some(d) = days {
                config.synth.days = *d;
            }
            if let Some(s) = start {
                config.synth.start = *s;
            }
        }
        Command::Ingest { .. } => {}
    }
    if let Command::Cluster { k: Some(k), .. } = cli.command {
        config.clustering.k = Some(k);
    }
    if let Command::Forecast { train_end: Some(d), .. } = cli.command {
        config.forecast.train_end = Some(d);
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = resolve(&cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build_global()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    match cli.command {
        Command::Ingest { path, strict } => commands::ingest(&path, strict || config.strict).map(|_| ()),
        Command::Cluster { .. } => commands::cluster(&config).map(|_| ()),
        Command::Forecast { method, approach, tl, la, .. } => {
            let method = match method {
                MethodArg::Ad => Method::Ad,
                MethodArg::Sa => Method::Sa,
                MethodArg::Lstm => Method::Lstm,
            };
            let approach = match approach {
                ApproachArg::Cu => Approach::Cu,
                ApproachArg::Ca => Approach::Ca,
            };
            commands::forecast(&config, method, approach, tl, la).map(|_| ())
        }
        Command::Evaluate { .. } => commands::evaluate(&config).map(|_| ()),
        Command::Synth { .. } => commands::synth(&config, &config.output_dir).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code())
        }
    }
}
