//! Command-line layer: experiment manifests, orchestration, and file output.
//!
//! The binary dispatches on one of six subcommands, each paired with a
//! manifest kind: `riemann`, `approx-wave`, `simulate`, `verify-decay`,
//! `compare-limit`, `convergence`. Everything a command computes lands in the
//! output directory tagged with the manifest's hash; exit codes are 0 on
//! success, 2 for config errors, 3 for positivity failures, 4 for a failed
//! verification, 1 for anything else.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::CliError;

/// Run the command the manifest asks for, writing into `out_dir`.
pub fn run_command(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    match cfg.kind {
        ExperimentKind::Riemann => commands::riemann::execute(cfg, out_dir).map(drop),
        ExperimentKind::ApproxWave => commands::approx_wave::execute(cfg, out_dir).map(drop),
        ExperimentKind::Simulate => commands::simulate::execute(cfg, out_dir).map(drop),
        ExperimentKind::VerifyDecay => commands::verify_decay::execute(cfg, out_dir).map(drop),
        ExperimentKind::CompareLimit => commands::compare_limit::execute(cfg, out_dir).map(drop),
        ExperimentKind::Convergence => commands::convergence::execute(cfg, out_dir).map(drop),
    }
}
