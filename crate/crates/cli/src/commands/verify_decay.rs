//! Decay-exponent verification campaign. Samples the gradient norms of the
//! smoothed single-family wave and of the composite wave on t in [10, 1000],
//! fits log-log slopes, and passes judgement against the predicted exponents:
//! t^0 for ||w_x||_L1, t^{-1/2} for ||w_x||_L2 and ||V_x||_L2, t^{-1} for
//! ||w_x||_Linf. Any failed row maps to exit code 4.

use std::path::Path;

use rarewave_core::burgers::SmoothRarefaction;
use rarewave_core::diagnostics::{decay_fit, discrete_norm, NormKind};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{fmt_float, write_csv, write_meta, JsonValue};

use super::ensure_dir;

/// Sample times 10^(1 + k/4), k = 0..8.
const TIME_DECADES: usize = 9;
/// Uniform samples per norm window.
const WINDOW_SAMPLES: usize = 8001;

pub struct DecayRow {
    pub quantity: &'static str,
    pub fitted: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub r2: f64,
    pub r2_floor: Option<f64>,
    pub pass: bool,
}

pub struct DecayReport {
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn sample_times() -> Vec<f64> {
    (0..TIME_DECADES).map(|k| 10f64.powf(1.0 + k as f64 / 4.0)).collect()
}

/// Uniform window around the spreading wave support. The tails of the
/// smoothed profile decay like (eps x)^{-2q}, so a fixed multiple of 1/eps
/// past the characteristic edges captures all but a negligible remainder.
fn window(w_lo: f64, w_hi: f64, t: f64, eps: f64) -> (f64, f64, f64) {
    let margin = 20.0 / eps + 20.0;
    let a = w_lo * t - margin;
    let b = w_hi * t + margin;
    let dx = (b - a) / (WINDOW_SAMPLES - 1) as f64;
    (a, b, dx)
}

fn judge(
    quantity: &'static str,
    points: &[(f64, f64)],
    expected: f64,
    tolerance: f64,
    r2_floor: Option<f64>,
) -> Result<DecayRow, CliError> {
    let fit = decay_fit(points)?;
    let pass =
        (fit.slope - expected).abs() <= tolerance && r2_floor.is_none_or(|floor| fit.r2 >= floor);
    Ok(DecayRow {
        quantity,
        fitted: fit.slope,
        expected,
        tolerance,
        r2: fit.r2,
        r2_floor,
        pass,
    })
}

pub fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<DecayReport, CliError> {
    ensure_dir(out)?;
    let wave = cfg.approx_wave()?;
    let fan = wave.fan();
    let hash = cfg.config_hash();
    let eps = cfg.eps();

    // single-family norms are fitted on the wider of the two fans
    let width1 = fan.w1_plus - fan.w1_minus;
    let width2 = fan.w2_plus - fan.w2_minus;
    let (w_lo, w_hi) = if width2 >= width1 {
        (fan.w2_minus, fan.w2_plus)
    } else {
        (fan.w1_minus, fan.w1_plus)
    };
    if !(w_hi > w_lo) {
        return Err(CliError::Config(
            "verify-decay needs a fan of nonzero strength; both characteristic intervals are points"
                .into(),
        ));
    }
    let burg = SmoothRarefaction::new(w_lo, w_hi, eps, cfg.smoothing.q)?;

    let times = sample_times();
    let mut wx_l1 = Vec::with_capacity(times.len());
    let mut wx_l2 = Vec::with_capacity(times.len());
    let mut wx_linf = Vec::with_capacity(times.len());
    let mut vx_l2 = Vec::with_capacity(times.len());
    let mut samples_rows = Vec::new();

    for &t in &times {
        let (a, _, dx) = window(w_lo, w_hi, t, eps);
        let wx: Vec<f64> = (0..WINDOW_SAMPLES)
            .map(|i| burg.evaluate(t, a + i as f64 * dx).map(|p| p.w_x))
            .collect::<Result<_, _>>()?;
        wx_l1.push((t, discrete_norm(&wx, dx, NormKind::L1)?));
        wx_l2.push((t, discrete_norm(&wx, dx, NormKind::L2)?));
        wx_linf.push((t, discrete_norm(&wx, dx, NormKind::LInf)?));

        let (a, _, dx) = window(fan.w1_minus, fan.w2_plus, t, eps);
        let vx: Vec<f64> = (0..WINDOW_SAMPLES)
            .map(|i| wave.eval_full(t, a + i as f64 * dx).map(|p| p.v_x))
            .collect::<Result<_, _>>()?;
        vx_l2.push((t, discrete_norm(&vx, dx, NormKind::L2)?));
    }

    for (name, series) in [
        ("||w_x||_L1", &wx_l1),
        ("||w_x||_L2", &wx_l2),
        ("||w_x||_Linf", &wx_linf),
        ("||V_x||_L2", &vx_l2),
    ] {
        for &(t, y) in series {
            samples_rows.push(vec![name.to_string(), fmt_float(t), fmt_float(y)]);
        }
    }
    write_csv(&out.join("decay_samples.csv"), &hash, "quantity,t,value", &samples_rows)?;

    let rows = vec![
        judge("||w_x||_L1", &wx_l1, 0.0, 0.1, None)?,
        judge("||w_x||_L2", &wx_l2, -0.5, 0.1, Some(0.98))?,
        judge("||w_x||_Linf", &wx_linf, -1.0, 0.15, None)?,
        judge("||V_x||_L2", &vx_l2, -0.5, 0.1, Some(0.98))?,
    ];

    let verdict_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.quantity.to_string(),
                fmt_float(r.fitted),
                fmt_float(r.expected),
                fmt_float(r.tolerance),
                fmt_float(r.r2),
                r.pass.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out.join("verdict.csv"),
        &hash,
        "quantity,fitted_slope,expected_slope,tolerance,r_squared,pass",
        &verdict_rows,
    )?;

    println!("decay verdicts (config {hash}):");
    for r in &rows {
        println!(
            "  {:<14} fitted {:+.4} (r2 {:.5})  expected {:+.2} +/- {:.2}  {}",
            r.quantity,
            r.fitted,
            r.r2,
            r.expected,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }

    let report = DecayReport { rows };
    write_meta(
        out,
        "verify-decay",
        &hash,
        &["decay_samples.csv", "verdict.csv"],
        &[("pass", JsonValue::Bool(report.all_pass()))],
    )?;

    if report.all_pass() {
        Ok(report)
    } else {
        let failing: Vec<&str> =
            report.rows.iter().filter(|r| !r.pass).map(|r| r.quantity).collect();
        Err(CliError::Verification(format!(
            "decay exponents out of tolerance for {}",
            failing.join(", ")
        )))
    }
}
