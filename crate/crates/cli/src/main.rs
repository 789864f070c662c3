use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;

use commands::{Outcome, UsageError};
use config::{Expectation, RunConfig};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Exact verification of neighborhood bases in L⁰-modules.
#[derive(Debug, Parser)]
#[command(name = "l0check", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Probe atoms 1..=N for certificates and cell checks.
    #[arg(long, global = true, value_name = "N")]
    horizon: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every check on the configured base and decide whether a seminorm
    /// family induces its topology.
    VerifyCounterexample,
    /// Evaluate one expression, e.g. `eval "prob {1, 3}"`.
    Eval {
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        expr: Vec<String>,
    },
    /// Run a single check against the configured objects.
    Check { target: Target },
    /// Build a singleton-tail partition and verify its tail-cell masses.
    Partition {
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    Axioms,
    Roundtrip,
    Cc,
    Base,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.params.seed = s;
    }
    if let Some(h) = cli.horizon {
        cfg.params.horizon = h;
    }
    if let Some(n) = cli.samples {
        cfg.params.samples = n;
    }

    let result = match &cli.command {
        Command::VerifyCounterexample => commands::verify_counterexample(&cfg),
        Command::Eval { expr } => commands::eval(&cfg, &expr.join(" ")),
        Command::Check { target } => match target {
            Target::Axioms => commands::check_axioms(&cfg),
            Target::Roundtrip => commands::check_roundtrip(&cfg),
            Target::Cc => commands::check_cc(&cfg),
            Target::Base => commands::check_base(&cfg),
        },
        Command::Partition { spec } => commands::partition(&cfg, &spec.join(" ")),
    };
    match result {
        Ok(outcome) => finish(&cli, &cfg, outcome),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn finish(cli: &Cli, cfg: &RunConfig, outcome: Outcome) -> ExitCode {
    let is_eval = matches!(cli.command, Command::Eval { .. });
    match &cli.json {
        Some(path) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
            out(&outcome.summary);
        }
        None if is_eval => out(&outcome.summary),
        None => {
            out(&serde_json::to_string_pretty(&outcome.report).expect("report serializes"));
            eprintln!("{}", outcome.summary);
        }
    }
    let expected_pass = cfg.expect == Expectation::Pass;
    if outcome.pass == expected_pass {
        ExitCode::from(EXIT_PASS)
    } else {
        if !outcome.pass {
            eprintln!("check failed");
        } else {
            eprintln!("check passed but the config expects a failure");
        }
        ExitCode::from(EXIT_FAIL)
    }
}

/// Prints a line to stdout; a closed pipe (`| head`) is not an error.
fn out(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}
