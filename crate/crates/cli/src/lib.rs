//! Command-line front end for `nilrec` experiments.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use nilrec::Exec;
use serde_json::Value;

use crate::commands::Env;
use crate::config::ExperimentConfig;
use crate::error::{CliError, EXIT_CONFIG};
use crate::output::{render, Format, Provenance};

pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Debug, Parser)]
#[command(name = "nilrec", version, about = "Well-distribution decisions, multiple ergodic averages and recurrence scans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for result files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Decimal digits for generator values.
    #[arg(long, global = true)]
    pub precision: Option<u32>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Fill the runtime_ms column of averaging runs.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rational independence of a comma-separated polynomial list.
    CheckIndependence { polynomials: Option<String> },
    /// Exact well-distribution verdict for a joint orbit.
    Decide {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// Character sums over Følner boxes.
    Charsum {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// Multiple ergodic averages along an N schedule.
    Average {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// Uniformity seminorm estimate.
    Seminorm {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// E_m |E_n product|^2 along an N schedule.
    Diagnostic {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// Rational Kronecker projection and its double-limit estimate.
    Project {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// Recurrence scan over an N schedule.
    Scan {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// The two-variable counterexample, with and without m.
    DemoCounterexample {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckIndependence { .. } => "check-independence",
            Command::Decide { .. } => "decide",
            Command::Charsum { .. } => "charsum",
            Command::Average { .. } => "average",
            Command::Seminorm { .. } => "seminorm",
            Command::Diagnostic { .. } => "diagnostic",
            Command::Project { .. } => "project",
            Command::Scan { .. } => "scan",
            Command::DemoCounterexample { .. } => "demo-counterexample",
        }
    }

    fn config_path(&self) -> Option<&PathBuf> {
        match self {
            Command::CheckIndependence { .. } => None,
            Command::Decide { path }
            | Command::Charsum { path }
            | Command::Average { path }
            | Command::Seminorm { path }
            | Command::Diagnostic { path }
            | Command::Project { path }
            | Command::Scan { path }
            | Command::DemoCounterexample { path } => path.as_ref(),
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Charsum { .. } | Command::Average { .. } | Command::Diagnostic { .. } | Command::Scan { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli.command.config_path().or(cli.config.as_ref());
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            ExperimentConfig::parse(&text)
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Option<CliError>, CliError> {
    let mut cfg = load_config(cli)?;
    let precision = cli.precision.or(cfg.precision).unwrap_or(DEFAULT_PRECISION);
    cfg.precision = Some(precision);
    let res = cfg.resolve(precision)?;
    let exec = match cli.threads {
        Some(0) => return Err(CliError::Config("--threads must be positive".into())),
        Some(1) => Exec::Sequential,
        Some(k) => {
            nilrec::par::configure_threads(k);
            Exec::Parallel
        }
        None => Exec::Parallel,
    };
    let env = Env { cfg: &cfg, res: &res, exec, timing: cli.timing };
    let (out, failure) = match &cli.command {
        Command::CheckIndependence { polynomials } => commands::check_independence(&env, polynomials.as_deref())?,
        Command::Decide { .. } => commands::decide(&env)?,
        Command::Charsum { .. } => commands::charsum(&env)?,
        Command::Average { .. } => commands::average(&env)?,
        Command::Seminorm { .. } => commands::seminorm(&env)?,
        Command::Diagnostic { .. } => commands::diagnostic(&env)?,
        Command::Project { .. } => commands::project(&env)?,
        Command::Scan { .. } => commands::scan(&env)?,
        Command::DemoCounterexample { .. } => commands::demo(&env)?,
    };
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let prov = Provenance {
        tool: "nilrec",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        precision_digits: precision,
        parallel: cfg!(feature = "parallel"),
    };
    let config_json = serde_json::to_value(&cfg).unwrap_or(Value::Null);
    let text = render(format, &prov, &config_json, &out);
    stdout.write_all(text.as_bytes())?;
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.{}", cli.command.name(), format.extension())), &text)?;
    }
    Ok(failure)
}

/// Runs the tool and returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let err = CliError::Config(e.to_string().trim().to_string());
            let _ = writeln!(stderr, "{}", err.to_json());
            return EXIT_CONFIG;
        }
    };
    let failure = match execute(&cli, stdout) {
        Ok(None) => return 0,
        Ok(Some(f)) => f,
        Err(e) => e,
    };
    let _ = writeln!(stderr, "{}", failure.to_json());
    failure.exit_code()
}
