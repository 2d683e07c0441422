use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jtcran::validation::SuiteSettings;
use jtcran_cli::config::{ValidationSpec, SEED_ENV};
use jtcran_cli::{execute, parse_config, CliError, ExperimentKind, ExperimentSpec};

/// Coverage of distance-based joint transmission: analytic evaluator and
/// Monte Carlo simulator.
///
/// Exit codes: 0 success, 1 config error, 2 numeric failure, 3 acceptance
/// gate failure.
#[derive(Parser)]
#[command(name = "jtcran", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides the `output` directory of the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides `mc.workers`.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Runs the acceptance checks and prints one line per check.
    Validate {
        /// Small sample sizes; a smoke test, not a verdict.
        #[arg(long)]
        quick: bool,
        /// Comma-separated check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[arg(long, default_value = "results/validation")]
        output: PathBuf,
    },
    /// Prints a config with every default spelled out.
    ShowDefaults {
        #[arg(long, value_enum, default_value = "coverage_curve")]
        kind: ExperimentKind,
    },
}

fn seed_override() -> Option<String> {
    std::env::var(SEED_ENV).ok()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, output, workers } => {
            let mut spec = parse_config(&config)?.with_seed_override(seed_override().as_deref())?;
            if let Some(dir) = output {
                spec.output = dir;
            }
            if let Some(w) = workers {
                spec.mc.workers = w;
            }
            report(&spec)
        }
        Command::Validate { quick, only, output } => {
            let mut spec = ExperimentSpec::defaults(ExperimentKind::ValidationSuite);
            let settings = if quick { SuiteSettings::quick() } else { SuiteSettings::default() };
            spec.validation = ValidationSpec {
                only,
                ..ValidationSpec::from_settings(&settings)
            };
            spec.output = output;
            let spec = spec.with_seed_override(seed_override().as_deref())?;
            spec.validate()?;
            report(&spec)
        }
        Command::ShowDefaults { kind } => {
            print!("{}", ExperimentSpec::defaults(kind).to_toml());
            Ok(())
        }
    }
}

fn report(spec: &ExperimentSpec) -> Result<(), CliError> {
    let summary = execute(spec)?;
    for c in &summary.output.checks {
        println!("{c}");
    }
    for path in &summary.written {
        eprintln!("wrote {}", path.display());
    }
    let failed = summary.output.failed();
    if !failed.is_empty() {
        let ids: Vec<String> = failed.iter().map(|c| c.id.to_string()).collect();
        return Err(CliError::Gate(format!("checks {} failed", ids.join(", "))));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jtcran: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
