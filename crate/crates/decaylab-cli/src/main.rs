//! Experiment driver for the decay laboratory.
//!
//! Exit codes: 0 when the requested checks pass (or the task is a pure
//! table), 1 when a check finds a counterexample, 2 for configuration
//! problems, 3 when a computation cannot finish.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use decaylab::{Error, Result};

mod config;
mod tasks;

use config::{ExperimentConfig, Lab};
use tasks::Outcome;

#[derive(Parser)]
#[command(
    name = "decaylab",
    version,
    about = "Decay envelopes, damped wave runs, and inequality checks from one config file"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the decay envelopes on a geometric time grid.
    Envelope(RunArgs),
    /// Integrate one wave run; write the energy trace and snapshots.
    Simulate(RunArgs),
    /// Simulate nonlinear damping and check it against the calibrated envelope.
    Compare(RunArgs),
    /// Measure observability constants and the exponential trend fit.
    Observability(RunArgs),
    /// Run the inequality suite and write its margins.
    Lemmas(LemmasArgs),
    /// Sequence-versus-ODE comparison tables and the explicit decay bound.
    Seqlab(RunArgs),
    /// Print the annotated example config, or validate an existing one.
    Config(ConfigArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks the machine's core count.
    #[arg(long, value_name = "N", default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct LemmasArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Rerun the observation-transfer check with its constant lowered by
    /// one and record whether the corrupted inequality still holds. The
    /// row is informational and never affects the exit status.
    #[arg(long)]
    corrupt_transfer: bool,
}

#[derive(Args)]
#[command(group = ArgGroup::new("source").required(true).args(["example", "config"]))]
struct ConfigArgs {
    /// Print the annotated example configuration to stdout.
    #[arg(long)]
    example: bool,
    /// Parse and validate a configuration, then print its canonical form.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Domain(_) | Error::Premise(_) => 2,
                _ => 3,
            })
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Config(args) => run_config(args),
        Command::Envelope(args) => with_lab(args, tasks::envelope),
        Command::Simulate(args) => with_lab(args, tasks::simulate),
        Command::Compare(args) => with_lab(args, tasks::compare),
        Command::Observability(args) => with_lab(args, tasks::observability),
        Command::Seqlab(args) => with_lab(args, tasks::seqlab),
        Command::Lemmas(args) => {
            let corrupt = args.corrupt_transfer;
            with_lab(args.run, move |cfg, lab, out| tasks::lemmas(cfg, lab, out, corrupt))
        }
    }
}

fn with_lab(
    args: RunArgs,
    task: impl FnOnce(&ExperimentConfig, &Lab, &std::path::Path) -> Result<Outcome>,
) -> Result<Outcome> {
    if args.threads > 0 {
        // A second global-pool registration (tests, repeated dispatch)
        // keeps the first pool; that is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global();
    }
    let text = fs::read_to_string(&args.config).map_err(|e| {
        Error::config(format!("cannot read config {}: {e}", args.config.display()))
    })?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    let lab = cfg.build()?;
    let out = tasks::ensure_dir(&cfg.out)?;
    task(&cfg, &lab, &out)
}

fn run_config(args: ConfigArgs) -> Result<Outcome> {
    if args.example {
        print!("{}", config::EXAMPLE);
        return Ok(Outcome::Pass);
    }
    let path = args.config.expect("clap enforces the source group");
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    cfg.build()?;
    print!("{}", cfg.to_toml()?);
    Ok(Outcome::Pass)
}
