use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracstab_cli::commands::{self, SignalSource, Xbar};
use fracstab_cli::error::{CliError, EXIT_CERTIFICATE_FAILED, EXIT_INTERNAL, EXIT_PASS};
use fracstab_cli::{build_report, ExperimentConfig};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "fracstab",
    version,
    about = "Fractional-order stability experiments for HIV models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print R0 and the equilibria as JSON.
    R0 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve every order and write CSV files and an SVG plot.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the Ψ inequality on a trajectory coordinate or a synthetic signal.
    VerifyLemma(LemmaArgs),
    /// Classify, certify and measure convergence for every order.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["coordinate", "constant", "samples"]))]
struct LemmaArgs {
    #[arg(long)]
    config: PathBuf,
    /// State label (e.g. S) whose trajectory is tested.
    #[arg(long)]
    coordinate: Option<String>,
    /// Test a constant signal instead.
    #[arg(long)]
    constant: Option<f64>,
    /// Test samples read from a file, one value per whitespace-separated token.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// s, s^2, log1p or s/(1+s).
    #[arg(long, default_value = "s")]
    g: String,
    /// Anchor value, or `equilibrium` for the report's target equilibrium.
    #[arg(long)]
    xbar: Xbar,
    /// Fractional order; defaults to the first order in the config.
    #[arg(long)]
    order: Option<f64>,
    /// Also write the certificate to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|source| CliError::Io {
            context: format!("writing {}", path.display()),
            source,
        })?;
    }
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::R0 { config } => {
            let cfg = ExperimentConfig::from_path(config)?;
            emit(&commands::r0(&cfg)?, None)?;
            Ok(EXIT_PASS)
        }
        Command::Simulate { config, out } => {
            let cfg = ExperimentConfig::from_path(config)?;
            for p in commands::simulate(&cfg, &out)? {
                println!("{}", p.display());
            }
            Ok(EXIT_PASS)
        }
        Command::VerifyLemma(a) => {
            let cfg = ExperimentConfig::from_path(&a.config)?;
            let source = match (a.coordinate, a.constant, a.samples) {
                (Some(c), _, _) => SignalSource::Coordinate(c),
                (_, Some(v), _) => SignalSource::Constant(v),
                (_, _, Some(p)) => SignalSource::Samples(p),
                _ => unreachable!("clap enforces one source"),
            };
            let cert = commands::verify_lemma(&cfg, &source, &a.g, a.xbar, a.order)?;
            emit(&cert, a.out.as_ref())?;
            Ok(if cert.pass { EXIT_PASS } else { EXIT_CERTIFICATE_FAILED })
        }
        Command::Report { config, out } => {
            let cfg = ExperimentConfig::from_path(config)?;
            let report = build_report(&cfg)?;
            emit(&report, out.as_ref())?;
            Ok(if report.pass {
                EXIT_PASS
            } else {
                EXIT_CERTIFICATE_FAILED
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                fracstab_cli::error::EXIT_CONFIG
            } else {
                EXIT_PASS
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fracstab: {e}");
            let code = e.exit_code();
            ExitCode::from(if code == 0 { EXIT_INTERNAL } else { code })
        }
    }
}
