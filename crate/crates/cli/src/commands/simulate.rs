//! Run the solver on the smoothed wave plus perturbation, writing dense field
//! snapshots (CSV) and a per-snapshot diagnostics series (JSONL). A positivity
//! abort still writes whatever was produced, plus failure.json, and maps to
//! exit code 3.

use std::path::Path;

use rarewave_core::approx_wave::ApproxWave;
use rarewave_core::diagnostics::{
    conservation_ledger, discrete_norm, energy_ingredients, entropy_functionals,
    perturbation_fields, rarefaction_error, EnergyAccumulator, NormKind,
};
use rarewave_core::solver::{run, RunError, RunHistory};
use rarewave_core::Grid1D;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{
    fmt_float, write_csv, write_failure, write_meta, write_series, JsonValue, SeriesErrors,
    SeriesNorms, SeriesRecord, SeriesTotals,
};

use super::{boundary_guard, ensure_dir, far_field_guard, with_final_snapshot};

pub struct SimulateReport {
    pub steps: u64,
    pub records: Vec<SeriesRecord>,
}

pub fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<SimulateReport, CliError> {
    ensure_dir(out)?;
    let wave = cfg.approx_wave()?;
    let grid = cfg.grid()?;
    let hash = cfg.config_hash();
    boundary_guard(wave.fan(), cfg.solver.t_end, cfg.solver.half_length);
    far_field_guard(&wave, &grid);

    let initial = wave
        .build_initial_state(&grid, &cfg.perturbation_spec(), cfg.solver.mu)
        .map_err(|e| CliError::Config(format!("initial data: {e}")))?;
    let solver_config = with_final_snapshot(cfg.solver_config()?);

    let (history, failure_time) = match run(&solver_config, &grid, initial, &mut []) {
        Ok(h) => (h, None),
        Err(RunError::Invalid(e)) => return Err(CliError::Config(e.to_string())),
        Err(RunError::Positivity(f)) => {
            let time = f.time;
            (f.partial, Some(time))
        }
    };

    let mut rows = Vec::with_capacity(history.snapshots.len() * grid.cell_count());
    for snap in &history.snapshots {
        let state = &snap.state;
        for j in 0..grid.cell_count() {
            rows.push(vec![
                fmt_float(state.t),
                fmt_float(grid.center(j)),
                fmt_float(state.v[j]),
                fmt_float(state.u[j]),
                fmt_float(state.s[j]),
            ]);
        }
    }
    write_csv(&out.join("snapshots.csv"), &hash, "t,x,v,u,s", &rows)?;

    let records = build_series(cfg, &wave, &grid, &history, &hash)?;
    write_series(&records, &out.join("series.jsonl"))?;

    let final_t = history.snapshots.last().map_or(0.0, |s| s.state.t);
    let final_e = records.last().map_or(0.0, |r| r.e);
    write_meta(
        out,
        "simulate",
        &hash,
        &["snapshots.csv", "series.jsonl"],
        &[
            ("steps", JsonValue::Int(history.steps)),
            ("snapshots", JsonValue::Int(history.snapshots.len() as u64)),
            ("final_time", JsonValue::Num(final_t)),
            ("final_E", JsonValue::Num(final_e)),
            ("completed", JsonValue::Bool(failure_time.is_none())),
        ],
    )?;

    if let Some(time) = failure_time {
        write_failure(out, &hash, time)?;
        eprintln!(
            "positivity failure at t = {}; partial outputs and failure.json written",
            fmt_float(time)
        );
        return Err(CliError::Positivity { time });
    }

    println!(
        "simulate: {} steps to t = {final_t}, {} snapshots, E = {final_e}",
        history.steps,
        history.snapshots.len()
    );
    Ok(SimulateReport { steps: history.steps, records })
}

/// One diagnostics record per recorded snapshot: field norms, the running
/// energy, the entropy pair, sup errors against the sharp fan (undefined at
/// t = 0), and the conservation ledger.
fn build_series(
    cfg: &ExperimentConfig,
    wave: &ApproxWave,
    grid: &Grid1D,
    history: &RunHistory,
    hash: &str,
) -> Result<Vec<SeriesRecord>, CliError> {
    let mu = cfg.solver.mu;
    let tau = cfg.solver.tau;
    let dx = grid.dx();
    let ledger = conservation_ledger(history, grid);
    let mut acc = EnergyAccumulator::new();
    let mut records = Vec::with_capacity(history.snapshots.len());
    for (snap, row) in history.snapshots.iter().zip(&ledger) {
        let state = &snap.state;
        let fields = perturbation_fields(state, wave, mu, grid)?;
        let ing = energy_ingredients(state, wave, mu, grid)?;
        let norms = SeriesNorms {
            phi_l2: discrete_norm(&fields.phi, dx, NormKind::L2)?,
            psi_l2: discrete_norm(&fields.psi, dx, NormKind::L2)?,
            s_l2: discrete_norm(&fields.s_pert, dx, NormKind::L2)?,
            phi_h2: discrete_norm(&fields.phi, dx, NormKind::H2)?,
            psi_h2: discrete_norm(&fields.psi, dx, NormKind::H2)?,
            s_h2: discrete_norm(&fields.s_pert, dx, NormKind::H2)?,
            h2_total: ing.h2_total,
        };
        let e = acc.push(state.t, &ing)?;
        let ef = entropy_functionals(state, wave, tau, mu, grid)?;
        let err = if state.t > 0.0 {
            let se = rarefaction_error(state, wave.fan(), grid)?;
            SeriesErrors { sup_v: Some(se.v), sup_u: Some(se.u), sup_s: Some(se.s) }
        } else {
            SeriesErrors { sup_v: None, sup_u: None, sup_s: None }
        };
        records.push(SeriesRecord {
            t: state.t,
            norms,
            e,
            e1: ef.e1,
            e2: ef.e2,
            err,
            totals: SeriesTotals {
                v: row.total_v,
                u: row.total_u,
                drift_v: row.drift_v,
                drift_u: row.drift_u,
            },
            config_hash: hash.to_string(),
        });
    }
    Ok(records)
}
