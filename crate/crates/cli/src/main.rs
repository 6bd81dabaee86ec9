//! `cgof`: goodness-of-fit tests for Type-II right-censored samples.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

const EXIT_CODES: &str = "\
Exit status:
  0  the command ran (for gof: no test rejected at --alpha)
  1  usage or runtime error
  2  gof only: at least one requested test rejected at --alpha";

#[derive(Debug, Parser)]
#[command(name = "cgof", version, about = "Goodness-of-fit tests for Type-II right-censored samples", after_help = EXIT_CODES)]
pub struct Cli {
    /// Worker threads for simulations (default: all cores). Results do not
    /// depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test one censored sample against a null family.
    Gof(GofArgs),
    /// Simulate null critical values.
    Critvals(CritvalsArgs),
    /// Run a power study described by a config file.
    Power(PowerArgs),
    /// Simulate the empirical-process decomposition curves.
    Process(ProcessArgs),
}

#[derive(Debug, Args)]
pub struct GofArgs {
    /// One observed value per line: the r smallest of n. Blank lines and
    /// `#` comments are skipped.
    pub data: PathBuf,
    /// Total sample size n, censored values included.
    #[arg(long)]
    pub n: Option<usize>,
    /// Keep only the r smallest values; with a full sample, n defaults to
    /// the number of values read.
    #[arg(long)]
    pub r: Option<usize>,
    /// Null family: exp, gamma or normal.
    #[arg(long, default_value = "exp")]
    pub null: String,
    /// MS, OS, LHB, FK1, FK2, a comma list, or `all`.
    #[arg(long, default_value = "all")]
    pub transform: String,
    /// A2, W2, C2, DS_A2, DS_W2, a comma list, or `all` (A2, W2, C2).
    #[arg(long, default_value = "all")]
    pub statistic: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Replications for the simulated critical values.
    #[arg(long, default_value_t = 100_000)]
    pub critval_reps: usize,
    /// Read critical values from a `cgof critvals` file instead of
    /// simulating them.
    #[arg(long)]
    pub critvals: Option<PathBuf>,
    /// Weight a of the characteristic-function statistic.
    #[arg(long, default_value_t = 0.5)]
    pub cf_weight: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write the results as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CritvalsArgs {
    /// A2, W2, C2, DS_A2, DS_W2 or a comma list.
    #[arg(long, default_value = "A2,W2,C2")]
    pub statistic: String,
    /// Number of observed values.
    #[arg(long)]
    pub r: usize,
    /// Total sample size; direct statistics only.
    #[arg(long)]
    pub n: Option<usize>,
    /// Null family (exp or normal); direct statistics only.
    #[arg(long)]
    pub null: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,
    /// Comma list of upper-tail levels.
    #[arg(long, default_value = "0.1,0.05,0.01")]
    pub levels: String,
    #[arg(long, default_value_t = 0.5)]
    pub cf_weight: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Flat `key = value` study description.
    #[arg(long)]
    pub config_file: PathBuf,
    /// Override one key, e.g. `--set n=40`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// 2000 replications per cell instead of the configured count.
    #[arg(long)]
    pub fast: bool,
    /// Run only the alternatives from the null family (the canonical null
    /// model if none): a level study.
    #[arg(long)]
    pub level: bool,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    /// Sample size (at least 10).
    #[arg(long)]
    pub n: usize,
    /// Replications.
    #[arg(long = "B", default_value_t = 10_000)]
    pub b: usize,
    /// Sampling model; only exponential models are supported.
    #[arg(long, default_value = "exp(1)")]
    pub family: String,
    /// Grid runs from delta to 1 - delta.
    #[arg(long, default_value_t = 0.005)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.005)]
    pub spacing: f64,
    /// Replace the normal scores by normals independent of the data.
    #[arg(long)]
    pub independent_normals: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a command failed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(String),
}

impl From<censored_gof::Error> for Failure {
    fn from(e: censored_gof::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

/// A command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Ran,
    Rejected,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Ran) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(2),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}\n\nFor more information, try '--help'.");
            ExitCode::from(1)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Run(format!("cannot build thread pool: {e}")))?;
    }
    match cli.command {
        Command::Gof(a) => commands::gof(&a),
        Command::Critvals(a) => commands::critvals(&a),
        Command::Power(a) => commands::power(&a, cli.threads),
        Command::Process(a) => commands::process(&a, cli.threads),
    }
}
