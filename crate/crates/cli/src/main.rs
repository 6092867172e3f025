use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rarewave_cli::{CliError, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(
    name = "rarewave",
    version,
    about = "Numerical laboratory for relaxed double-rarefaction waves in 1-D isentropic flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the experiment manifest (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the manifest's [output] dir
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the double-rarefaction fan and sample its exact profile
    Riemann(RunArgs),
    /// Tabulate the smooth approximate wave and its derivatives
    ApproxWave(RunArgs),
    /// Run the solver and write snapshots plus a diagnostics series
    Simulate(RunArgs),
    /// Fit gradient decay exponents and judge them against the predictions
    VerifyDecay(RunArgs),
    /// Sweep the relaxation time against the classical limit
    CompareLimit(RunArgs),
    /// Grid-refinement study of the solver
    Convergence(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Riemann(a) => (ExperimentKind::Riemann, a),
            Command::ApproxWave(a) => (ExperimentKind::ApproxWave, a),
            Command::Simulate(a) => (ExperimentKind::Simulate, a),
            Command::VerifyDecay(a) => (ExperimentKind::VerifyDecay, a),
            Command::CompareLimit(a) => (ExperimentKind::CompareLimit, a),
            Command::Convergence(a) => (ExperimentKind::Convergence, a),
        }
    }
}

fn try_run(kind: ExperimentKind, args: &RunArgs) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    if cfg.kind != kind {
        return Err(CliError::Config(format!(
            "manifest kind \"{}\" does not match subcommand \"{kind}\"",
            cfg.kind
        )));
    }
    let out_dir = args.out.clone().unwrap_or_else(|| cfg.out_dir());
    rarewave_cli::run_command(&cfg, &out_dir)
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    match try_run(kind, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
