//! Command-line front end: one subcommand per experiment preset.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cpb_fridge::io::{load_config, run_with_threads, write_outputs, Experiment, RunConfig, RunError};

#[derive(Parser)]
#[command(name = "cpbfridge", version, about = "Cooper-pair box refrigerator simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for `<experiment>_<hash>.csv` and `.svg`.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (all cores when omitted).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Charge-basis energy levels versus offset charge.
    Spectrum,
    /// One-tone transmission map.
    #[command(name = "one_tone")]
    OneTone,
    /// Two-tone linewidth series and dephasing extraction.
    #[command(name = "two_tone")]
    TwoTone,
    /// Refrigerator heat currents versus drive frequency.
    #[command(name = "otto_sweep")]
    OttoSweep,
    /// LCL filter transmission.
    Filter,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Spectrum => Experiment::Spectrum,
            Command::OneTone => Experiment::OneTone,
            Command::TwoTone => Experiment::TwoTone,
            Command::OttoSweep => Experiment::OttoSweep,
            Command::Filter => Experiment::Filter,
        }
    }
}

fn run(cli: &Cli) -> Result<i32, RunError> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    cfg.experiment = cli.command.into();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.threads == Some(0) {
        return Err(RunError::Config(cpb_fridge::io::ConfigError::Validation {
            field: "threads".into(),
            message: "must be >= 1".into(),
        }));
    }
    let out = run_with_threads(&cfg, cli.threads)?;
    let (csv, svg) = write_outputs(&out, &cli.out)?;
    println!("{}", csv.display());
    println!("{}", svg.display());
    for f in &out.failures {
        eprintln!("error: {f}");
    }
    Ok(if out.failures.is_empty() { 0 } else { 3 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
