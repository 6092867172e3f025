//! Relaxation-time sweep against the classical limit: identical initial data
//! is advanced to t_end with tau in {0.1, 0.05, 0.025} and with the tau = 0
//! parabolic solver, and the L2 distances to the classical state are reported
//! together with their per-halving ratios.

use std::path::Path;

use rarewave_core::diagnostics::{discrete_norm, NormKind};
use rarewave_core::solver::{run, RunError};
use rarewave_core::State;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{fmt_float, write_csv, write_failure, write_meta, JsonValue};

use super::{boundary_guard, ensure_dir, far_field_guard, parallel_map, with_final_snapshot};

pub const SWEEP_TAUS: [f64; 3] = [0.1, 0.05, 0.025];

pub struct CompareLimitReport {
    /// (tau, L2 distance to the classical solution at t_end).
    pub errors: Vec<(f64, f64)>,
    /// Consecutive error ratios, one per tau halving.
    pub ratios: Vec<f64>,
}

pub fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<CompareLimitReport, CliError> {
    ensure_dir(out)?;
    let wave = cfg.approx_wave()?;
    let grid = cfg.grid()?;
    let hash = cfg.config_hash();
    boundary_guard(wave.fan(), cfg.solver.t_end, cfg.solver.half_length);
    far_field_guard(&wave, &grid);
    let initial = wave
        .build_initial_state(&grid, &cfg.perturbation_spec(), cfg.solver.mu)
        .map_err(|e| CliError::Config(format!("initial data: {e}")))?;

    let mut taus = SWEEP_TAUS.to_vec();
    taus.push(0.0);
    let members: Vec<Result<State, CliError>> = parallel_map(taus.clone(), |tau| {
        let mut sc = cfg.solver_config_with_tau(tau)?;
        sc.snapshot_times = Vec::new();
        let sc = with_final_snapshot(sc);
        match run(&sc, &grid, initial.clone(), &mut []) {
            Ok(h) => Ok(h.snapshots.last().expect("final snapshot").state.clone()),
            Err(RunError::Invalid(e)) => Err(CliError::Config(e.to_string())),
            Err(RunError::Positivity(f)) => Err(CliError::Positivity { time: f.time }),
        }
    });

    let mut finals = Vec::with_capacity(members.len());
    for m in members {
        match m {
            Ok(state) => finals.push(state),
            Err(e @ CliError::Positivity { time }) => {
                write_failure(out, &hash, time)?;
                return Err(e);
            }
            Err(e) => return Err(e),
        }
    }
    let classical = finals.pop().expect("classical member");

    let dx = grid.dx();
    let mut errors = Vec::with_capacity(SWEEP_TAUS.len());
    for (tau, state) in taus.iter().zip(&finals) {
        let diff: Vec<f64> =
            state.v.iter().zip(&classical.v).map(|(a, b)| a - b).collect();
        errors.push((*tau, discrete_norm(&diff, dx, NormKind::L2)?));
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0].1 / w[1].1).collect();

    let mut rows = Vec::with_capacity(errors.len());
    for (i, &(tau, err)) in errors.iter().enumerate() {
        let ratio = ratios.get(i).map(|r| fmt_float(*r)).unwrap_or_default();
        rows.push(vec![fmt_float(tau), fmt_float(err), ratio]);
    }
    write_csv(&out.join("limit.csv"), &hash, "tau,l2_error,ratio", &rows)?;

    println!("tau sweep against the classical limit (t_end = {}):", cfg.solver.t_end);
    for &(tau, err) in &errors {
        println!("  tau = {tau:<6} ||v_tau - v_0||_L2 = {err:.6e}");
    }
    for (w, r) in errors.windows(2).zip(&ratios) {
        println!("  ratio {} / {} = {r:.4}", w[0].0, w[1].0);
    }

    write_meta(
        out,
        "compare-limit",
        &hash,
        &["limit.csv"],
        &[
            (
                "taus",
                JsonValue::Arr(SWEEP_TAUS.iter().map(|&t| JsonValue::Num(t)).collect()),
            ),
            (
                "errors",
                JsonValue::Arr(errors.iter().map(|&(_, e)| JsonValue::Num(e)).collect()),
            ),
            ("ratios", JsonValue::Arr(ratios.iter().map(|&r| JsonValue::Num(r)).collect())),
            ("t_end", JsonValue::Num(cfg.solver.t_end)),
        ],
    )?;

    Ok(CompareLimitReport { errors, ratios })
}
