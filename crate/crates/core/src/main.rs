//! Command-line front end. Exit codes: 0 ok, 1 invariant failure, 2 config error,
//! 3 solver failure. Errors are printed to stderr as one JSON record.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use frac_ch::commands::{self, CommandError, ErrorKind, Outcome};
use frac_ch::config::{parse_config, RunConfig};

#[derive(Parser)]
#[command(name = "frac-ch", version, about = "Fractional Cahn-Hilliard simulator and estimate checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (`key = value` lines); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of step-halving refinements, overriding `sweep.levels`.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Seed for randomized checks, overriding `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Snapshot every this many steps (0 disables), overriding `snapshot_stride`.
    #[arg(long, global = true)]
    snapshot_stride: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Single trajectory with per-step diagnostics and estimate ledgers.
    Run,
    /// Step-size refinement sweep with self-Cauchy differences.
    SweepH,
    /// Yosida parameter sweep over `sweep.lambdas`.
    SweepLambda,
    /// Continuous dependence on the forcing.
    Contdep,
    /// Every invariant suite.
    Check,
}

fn load(cli: &Cli) -> Result<(RunConfig, PathBuf), CommandError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CommandError::new(ErrorKind::Config, format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(levels) = cli.levels {
        cfg.sweep.levels = levels;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(stride) = cli.snapshot_stride {
        cfg.snapshot_stride = stride;
    }
    cfg.validate()
        .map_err(|(key, msg)| CommandError::new(ErrorKind::Config, format!("{key}: {msg}")))?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    Ok((cfg, out))
}

fn execute(cli: &Cli) -> Result<Outcome, CommandError> {
    let (cfg, out) = load(cli)?;
    match cli.command {
        Command::Run => commands::cmd_run(&cfg, &out),
        Command::SweepH => commands::cmd_sweep_h(&cfg, &out),
        Command::SweepLambda => commands::cmd_sweep_lambda(&cfg, &out),
        Command::Contdep => commands::cmd_contdep(&cfg, &out),
        Command::Check => commands::cmd_check(&cfg, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            println!("{} {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.summary.display());
            if let Some(failure) = &outcome.first_failure {
                let record = CommandError::new(ErrorKind::Invariant, failure.clone());
                eprintln!("{}", record.to_json());
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.error.exit_code() as u8)
        }
    }
}
