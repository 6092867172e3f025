//! Grid-refinement study: the configured cell count and its two doublings
//! advance the same initial data to t_end; the observed order comes from the
//! L1 distances between cell-average restrictions of consecutive solutions.
//! An order below the scheme's expectation maps to exit code 4.

use std::path::Path;

use rarewave_core::diagnostics::{conservation_ledger, discrete_norm, NormKind};
use rarewave_core::solver::{run, RunError, SchemeOrder};
use rarewave_core::{Grid1D, State};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{fmt_float, write_csv, write_failure, write_meta, JsonValue};

use super::{boundary_guard, ensure_dir, far_field_guard, parallel_map, with_final_snapshot};

pub struct ConvergenceReport {
    pub cells: [usize; 3],
    /// L1 differences: coarse vs medium, medium vs fine.
    pub diffs: [f64; 2],
    pub observed_order: f64,
    /// Largest conservation drift across all member runs.
    pub max_drift: f64,
    pub threshold: f64,
}

/// Average adjacent cell pairs: the exact restriction between nested uniform
/// grids over the same interval.
fn restrict_half(fine: &[f64]) -> Vec<f64> {
    fine.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

pub fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<ConvergenceReport, CliError> {
    ensure_dir(out)?;
    let wave = cfg.approx_wave()?;
    let hash = cfg.config_hash();
    boundary_guard(wave.fan(), cfg.solver.t_end, cfg.solver.half_length);

    let base = cfg.solver.cells;
    let cells = [base, 2 * base, 4 * base];
    let spec = cfg.perturbation_spec();

    let members: Vec<Result<(State, f64), CliError>> = parallel_map(cells.to_vec(), |n| {
        let grid = Grid1D::new(cfg.solver.half_length, n).map_err(|e| CliError::Config(e.to_string()))?;
        if n == base {
            far_field_guard(&wave, &grid);
        }
        let initial = wave
            .build_initial_state(&grid, &spec, cfg.solver.mu)
            .map_err(|e| CliError::Config(format!("initial data: {e}")))?;
        let mut sc = cfg.solver_config()?;
        sc.snapshot_times = Vec::new();
        let sc = with_final_snapshot(sc);
        match run(&sc, &grid, initial, &mut []) {
            Ok(h) => {
                let drift = conservation_ledger(&h, &grid)
                    .iter()
                    .map(|r| r.drift_v.abs().max(r.drift_u.abs()))
                    .fold(0.0, f64::max);
                Ok((h.snapshots.last().expect("final snapshot").state.clone(), drift))
            }
            Err(RunError::Invalid(e)) => Err(CliError::Config(e.to_string())),
            Err(RunError::Positivity(f)) => Err(CliError::Positivity { time: f.time }),
        }
    });

    let mut states = Vec::with_capacity(3);
    let mut max_drift = 0.0f64;
    for m in members {
        match m {
            Ok((state, drift)) => {
                states.push(state);
                max_drift = max_drift.max(drift);
            }
            Err(e @ CliError::Positivity { time }) => {
                write_failure(out, &hash, time)?;
                return Err(e);
            }
            Err(e) => return Err(e),
        }
    }

    let mut diffs = [0.0f64; 2];
    for i in 0..2 {
        let coarse = &states[i].v;
        let restricted = restrict_half(&states[i + 1].v);
        let diff: Vec<f64> = restricted.iter().zip(coarse).map(|(f, c)| f - c).collect();
        let dx = 2.0 * cfg.solver.half_length / cells[i] as f64;
        diffs[i] = discrete_norm(&diff, dx, NormKind::L1)?;
    }
    let observed_order = (diffs[0] / diffs[1]).log2();
    let threshold = match cfg.scheme_order() {
        SchemeOrder::Second => 1.8,
        SchemeOrder::First => 0.8,
    };

    let rows = vec![
        vec![cells[0].to_string(), cells[1].to_string(), fmt_float(diffs[0])],
        vec![cells[1].to_string(), cells[2].to_string(), fmt_float(diffs[1])],
    ];
    write_csv(&out.join("convergence.csv"), &hash, "coarse_cells,fine_cells,l1_diff", &rows)?;

    println!("refinement study at t_end = {} (cells {cells:?}):", cfg.solver.t_end);
    println!("  ||v_{} - v_{}||_L1 = {:.6e}", cells[1], cells[0], diffs[0]);
    println!("  ||v_{} - v_{}||_L1 = {:.6e}", cells[2], cells[1], diffs[1]);
    println!("  observed order = {observed_order:.4} (threshold {threshold})");
    println!("  max conservation drift = {max_drift:.3e}");

    write_meta(
        out,
        "convergence",
        &hash,
        &["convergence.csv"],
        &[
            ("observed_order", JsonValue::Num(observed_order)),
            ("threshold", JsonValue::Num(threshold)),
            ("max_drift", JsonValue::Num(max_drift)),
            (
                "cells",
                JsonValue::Arr(cells.iter().map(|&n| JsonValue::Int(n as u64)).collect()),
            ),
        ],
    )?;

    let report = ConvergenceReport { cells, diffs, observed_order, max_drift, threshold };
    if observed_order < threshold {
        return Err(CliError::Verification(format!(
            "observed convergence order {observed_order:.4} is below the threshold {threshold}"
        )));
    }
    Ok(report)
}
