use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use les_core::scenario::{
    local_check, run_exact_sequence, scan, ExactSequenceReport, LocalCheckReport, ScanReport,
    ScenarioConfig,
};
use les_core::torus::ScenarioError;
use serde::Deserialize;

/// Random samples per local-model check.
const LOCAL_SAMPLES: usize = 100;

#[derive(Parser)]
#[command(
    name = "les",
    version,
    about = "Exact sequence checks for a Dehn twist model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the triple for one configuration and run every check on it.
    VerifyLes {
        #[command(flatten)]
        common: Common,
        /// Also write a picture of the curves.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Numerical checks of the local twist model.
    LocalCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Run the checks on every triple of slopes up to a bound.
    TorusScan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "N")]
        max_slope: Option<i64>,
        /// Worker threads; 0 uses one per core.
        #[arg(long, value_name = "N", default_value_t = 0)]
        jobs: usize,
    },
    /// Re-render a JSON report written by another command.
    ReportRender {
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write a picture of the curves (verify-les reports only).
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "X")]
    epsilon: Option<f64>,
    #[arg(long, value_name = "X")]
    delta: Option<f64>,
    #[arg(long, value_name = "X")]
    twist_r: Option<f64>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyReport {
    Exact(Box<ExactSequenceReport>),
    Scan(ScanReport),
    Local(LocalCheckReport),
}

/// An invalid-input failure, reported with exit code 2.
struct Invalid(String);

impl<E: std::fmt::Display> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.to_string())
    }
}

impl Common {
    fn config(&self) -> Result<ScenarioConfig, Invalid> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
                ScenarioConfig::from_json(&text)
                    .map_err(|e| Invalid(format!("{}: {e}", path.display())))?
            }
            None => ScenarioConfig::default(),
        };
        if let Some(x) = self.epsilon {
            cfg.epsilon = x;
        }
        if let Some(x) = self.delta {
            cfg.delta = x;
        }
        if let Some(x) = self.twist_r {
            cfg.twist_r = x;
        }
        if let Some(n) = self.seed {
            cfg.seed = n;
        }
        Ok(cfg)
    }
}

fn emit(format: Format, text: String, json: String) {
    let out = match format {
        Format::Text => text,
        Format::Json => json + "\n",
    };
    // A closed pipe is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn write_file(path: &Path, contents: &str) -> Result<(), Invalid> {
    fs::write(path, contents).map_err(|e| Invalid(format!("{}: {e}", path.display())))
}

fn verdict(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, Invalid> {
    match cli.command {
        Command::VerifyLes { common, svg } => {
            let cfg = common.config()?;
            cfg.resolve()?;
            let report = match run_exact_sequence(&cfg) {
                Ok(r) => r,
                Err(e @ ScenarioError::ConditionsUnsatisfiable { .. }) => {
                    eprintln!("check failed: {e}");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(path) = svg {
                write_file(&path, &report.to_svg()?)?;
            }
            emit(common.format, report.render_text(), report.to_json());
            Ok(verdict(report.passed))
        }
        Command::LocalCheck { common } => {
            let cfg = common.config()?;
            let report = local_check(&cfg, LOCAL_SAMPLES)?;
            emit(common.format, report.render_text(), report.to_json());
            Ok(verdict(report.passed))
        }
        Command::TorusScan {
            common,
            max_slope,
            jobs,
        } => {
            let mut cfg = common.config()?;
            if let Some(n) = max_slope {
                cfg.max_slope = n;
            }
            cfg.validate()?;
            let report = scan(&cfg, jobs)?;
            emit(common.format, report.render_text(), report.to_json());
            Ok(verdict(report.passed))
        }
        Command::ReportRender {
            report,
            format,
            svg,
        } => {
            let text = fs::read_to_string(&report)
                .map_err(|e| Invalid(format!("{}: {e}", report.display())))?;
            let parsed: AnyReport = serde_json::from_str(&text)
                .map_err(|_| Invalid(format!("{}: not a report", report.display())))?;
            let passed = match parsed {
                AnyReport::Exact(r) => {
                    if let Some(path) = svg {
                        write_file(&path, &r.to_svg()?)?;
                    }
                    emit(format, r.render_text(), r.to_json());
                    r.passed
                }
                _ if svg.is_some() => {
                    return Err(Invalid("--svg needs a verify-les report".into()));
                }
                AnyReport::Scan(r) => {
                    emit(format, r.render_text(), r.to_json());
                    r.passed
                }
                AnyReport::Local(r) => {
                    emit(format, r.render_text(), r.to_json());
                    r.passed
                }
            };
            Ok(verdict(passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
