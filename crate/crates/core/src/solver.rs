//! Finite-volume solver for the relaxed system in Lagrangian coordinates and
//! for its classical (tau = 0) limit.
//!
//! The relaxed update is Strang-split: an exact exponential relaxation
//! half-step for the stress (with the forcing `mu u_x / v` frozen), a full
//! hyperbolic step for `(v, u)` with a local Lax-Friedrichs flux for
//! `F = (-u, p(v) - s)`, and a second relaxation half-step. The wave-speed
//! bound is the relaxed characteristic speed, which strictly dominates the
//! acoustic one. Order 2 adds minmod-limited reconstruction and a two-stage
//! strong-stability-preserving Runge-Kutta step.
//!
//! The classical limit advances `(v, u)` with the acoustic flux plus an
//! explicit centered viscous flux `-mu u_x / v`, and keeps `s = mu u_x / v`
//! as a diagnostic field.

use crate::error::{Error, Result};
use crate::gaslaw::{Family, PressureLaw};

/// Uniform cell-centered grid on `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    half_length: f64,
    cell_count: usize,
}

impl Grid1D {
    pub fn new(half_length: f64, cell_count: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::Domain(format!("half length must be positive, got {half_length}")));
        }
        if cell_count < 16 {
            return Err(Error::Domain(format!("need at least 16 cells, got {cell_count}")));
        }
        Ok(Self { half_length, cell_count })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.cell_count as f64
    }

    /// Center of cell `j`.
    pub fn center(&self, j: usize) -> f64 {
        -self.half_length + (j as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cell_count).map(|j| self.center(j)).collect()
    }
}

/// Cell-averaged fields at one instant. `v` must stay positive.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub s: Vec<f64>,
}

impl State {
    pub fn new(t: f64, v: Vec<f64>, u: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if v.len() != u.len() || v.len() != s.len() {
            return Err(Error::Domain(format!(
                "field lengths disagree: v {}, u {}, s {}",
                v.len(),
                u.len(),
                s.len()
            )));
        }
        if let Some(j) = v.iter().position(|x| !(*x > 0.0)) {
            return Err(Error::Domain(format!("v[{j}] = {} is not positive", v[j])));
        }
        if v.iter().chain(&u).chain(&s).any(|x| !x.is_finite()) {
            return Err(Error::Domain("state fields must be finite".into()));
        }
        Ok(Self { t, v, u, s })
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

/// Boundary treatment. Far-field cells see fixed ghost values taken from the
/// initial data, so untouched ends stay constant to machine precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryKind {
    #[default]
    FarFieldFixed,
}

/// Time integration order of the hyperbolic step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeOrder {
    First,
    Second,
}

/// Solver parameters. `tau = 0` selects the classical parabolic limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub law: PressureLaw,
    pub tau: f64,
    pub mu: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub boundary: BoundaryKind,
    pub order: SchemeOrder,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(Error::Domain(format!("tau must be nonnegative, got {}", self.tau)));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::Domain(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Domain(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Domain(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        let mut prev = -f64::INFINITY;
        for &ts in &self.snapshot_times {
            if !(ts >= 0.0) || ts > self.t_end {
                return Err(Error::Domain(format!(
                    "snapshot time {ts} outside [0, {}]",
                    self.t_end
                )));
            }
            if ts <= prev {
                return Err(Error::Domain("snapshot times must be strictly increasing".into()));
            }
            prev = ts;
        }
        Ok(())
    }
}

/// Stable step size for the current state.
///
/// Relaxed: `cfl dx / max_j c(v_j)` with the relaxed speed. Classical:
/// additionally capped by the explicit-diffusion limit
/// `0.25 dx^2 min_j v_j / mu`.
pub fn cfl_dt(config: &SolverConfig, grid: &Grid1D, state: &State) -> Result<f64> {
    config.validate()?;
    let dx = grid.dx();
    if config.tau > 0.0 {
        let mut cmax = 0.0f64;
        for &v in &state.v {
            cmax = cmax.max(config.law.relaxed_char_speed(config.mu, config.tau, v)?);
        }
        Ok(config.cfl * dx / cmax)
    } else {
        let mut lmax = 0.0f64;
        let mut vmin = f64::INFINITY;
        for &v in &state.v {
            lmax = lmax.max(config.law.lambda(v, Family::Two)?);
            vmin = vmin.min(v);
        }
        let acoustic = config.cfl * dx / lmax;
        let diffusive = 0.25 * dx * dx * vmin / config.mu;
        Ok(acoustic.min(diffusive))
    }
}

/// Fixed far-field ghost values, captured from the initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarField {
    pub v_left: f64,
    pub u_left: f64,
    pub s_left: f64,
    pub v_right: f64,
    pub u_right: f64,
    pub s_right: f64,
}

impl FarField {
    pub fn from_state(state: &State) -> Self {
        let n = state.len();
        Self {
            v_left: state.v[0],
            u_left: state.u[0],
            s_left: state.s[0],
            v_right: state.v[n - 1],
            u_right: state.u[n - 1],
            s_right: state.s[n - 1],
        }
    }
}

/// Time-integrated numerical fluxes through the two domain boundaries during
/// one step, for exact conservation accounting.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryFlux {
    pub v_left: f64,
    pub v_right: f64,
    pub u_left: f64,
    pub u_right: f64,
}

impl BoundaryFlux {
    fn add_weighted(&mut self, w: f64, raw: (f64, f64, f64, f64)) {
        self.v_left += w * raw.0;
        self.v_right += w * raw.1;
        self.u_left += w * raw.2;
        self.u_right += w * raw.3;
    }
}

/// Which closure supplies the interface speed bound and whether the viscous
/// flux is part of the update.
#[derive(Clone, Copy)]
enum FluxMode {
    Relaxed { mu: f64, tau: f64 },
    Classical { mu: f64 },
}

/// One conservative flux sweep. Writes the rate of change of `(v, u)` into
/// `dv`/`du` and returns the raw boundary fluxes
/// `(Fv_left, Fv_right, Fu_left, Fu_right)`.
#[allow(clippy::too_many_arguments)]
fn flux_sweep(
    law: &PressureLaw,
    mode: FluxMode,
    order: SchemeOrder,
    dx: f64,
    ff: &FarField,
    v: &[f64],
    u: &[f64],
    s: &[f64],
    dv: &mut [f64],
    du: &mut [f64],
) -> (f64, f64, f64, f64) {
    let n = v.len();
    let a = law.a();
    let g = law.gamma();
    let p = |vv: f64| a * vv.powf(-g);
    let speed = |vv: f64| match mode {
        FluxMode::Relaxed { mu, tau } => (mu / (tau * vv) + a * g * vv.powf(-g - 1.0)).sqrt(),
        FluxMode::Classical { .. } => (a * g).sqrt() * vv.powf(-0.5 * (g + 1.0)),
    };
    let vg = |i: isize| -> f64 {
        if i < 0 {
            ff.v_left
        } else if i >= n as isize {
            ff.v_right
        } else {
            v[i as usize]
        }
    };
    let ug = |i: isize| -> f64 {
        if i < 0 {
            ff.u_left
        } else if i >= n as isize {
            ff.u_right
        } else {
            u[i as usize]
        }
    };
    let sg = |i: isize| -> f64 {
        if i < 0 {
            ff.s_left
        } else if i >= n as isize {
            ff.s_right
        } else {
            s[i as usize]
        }
    };
    let minmod = |d1: f64, d2: f64| -> f64 {
        if d1 > 0.0 && d2 > 0.0 {
            d1.min(d2)
        } else if d1 < 0.0 && d2 < 0.0 {
            d1.max(d2)
        } else {
            0.0
        }
    };
    let slope = |f: &dyn Fn(isize) -> f64, i: isize| -> f64 {
        match order {
            SchemeOrder::First => 0.0,
            SchemeOrder::Second => minmod(f(i) - f(i - 1), f(i + 1) - f(i)),
        }
    };

    let mut fv = vec![0.0; n + 1];
    let mut fu = vec![0.0; n + 1];
    for k in 0..=n {
        let (il, ir) = (k as isize - 1, k as isize);
        let vl = vg(il) + 0.5 * slope(&vg, il);
        let vr = vg(ir) - 0.5 * slope(&vg, ir);
        let ul = ug(il) + 0.5 * slope(&ug, il);
        let ur = ug(ir) - 0.5 * slope(&ug, ir);
        let alpha = speed(vl).max(speed(vr));
        fv[k] = -0.5 * (ul + ur) - 0.5 * alpha * (vr - vl);
        let pressure_part = match mode {
            FluxMode::Relaxed { .. } => {
                let sl = sg(il) + 0.5 * slope(&sg, il);
                let sr = sg(ir) - 0.5 * slope(&sg, ir);
                0.5 * ((p(vl) - sl) + (p(vr) - sr))
            }
            FluxMode::Classical { .. } => 0.5 * (p(vl) + p(vr)),
        };
        let viscous_part = match mode {
            FluxMode::Relaxed { .. } => 0.0,
            FluxMode::Classical { mu } => {
                // centered viscous flux -mu u_x / v at the interface
                let vface = 0.5 * (vg(il) + vg(ir));
                -mu * (ug(ir) - ug(il)) / (dx * vface)
            }
        };
        fu[k] = pressure_part - 0.5 * alpha * (ur - ul) + viscous_part;
    }
    for j in 0..n {
        dv[j] = -(fv[j + 1] - fv[j]) / dx;
        du[j] = -(fu[j + 1] - fu[j]) / dx;
    }
    (fv[0], fv[n], fu[0], fu[n])
}

/// Advance `(v, u)` by `dt` with the selected flux mode and scheme order,
/// accumulating time-integrated boundary fluxes. Errors with the pre-step
/// time on positivity failure.
fn hyperbolic_step(
    config: &SolverConfig,
    grid: &Grid1D,
    ff: &FarField,
    state: &mut State,
    dt: f64,
    mode: FluxMode,
) -> Result<BoundaryFlux> {
    let n = state.len();
    let dx = grid.dx();
    let mut flux = BoundaryFlux::default();
    let mut dv = vec![0.0; n];
    let mut du = vec![0.0; n];

    match config.order {
        SchemeOrder::First => {
            let raw = flux_sweep(&config.law, mode, config.order, dx, ff, &state.v, &state.u, &state.s, &mut dv, &mut du);
            flux.add_weighted(dt, raw);
            for j in 0..n {
                state.v[j] += dt * dv[j];
                state.u[j] += dt * du[j];
            }
            ensure_positive(&state.v, state.t)?;
        }
        SchemeOrder::Second => {
            let raw = flux_sweep(&config.law, mode, config.order, dx, ff, &state.v, &state.u, &state.s, &mut dv, &mut du);
            flux.add_weighted(0.5 * dt, raw);
            let mut v1: Vec<f64> = (0..n).map(|j| state.v[j] + dt * dv[j]).collect();
            let mut u1: Vec<f64> = (0..n).map(|j| state.u[j] + dt * du[j]).collect();
            ensure_positive(&v1, state.t)?;
            let raw = flux_sweep(&config.law, mode, config.order, dx, ff, &v1, &u1, &state.s, &mut dv, &mut du);
            flux.add_weighted(0.5 * dt, raw);
            for j in 0..n {
                v1[j] += dt * dv[j];
                u1[j] += dt * du[j];
                state.v[j] = 0.5 * (state.v[j] + v1[j]);
                state.u[j] = 0.5 * (state.u[j] + u1[j]);
            }
            ensure_positive(&state.v, state.t)?;
        }
    }
    Ok(flux)
}

fn ensure_positive(v: &[f64], t: f64) -> Result<()> {
    if v.iter().any(|x| !(*x > 0.0)) {
        Err(Error::Numerics(format!("positivity failure at t = {t:.12e}")))
    } else {
        Ok(())
    }
}

/// Centered `u_x` with the far-field ghosts supplying boundary neighbors.
fn velocity_gradient(ff: &FarField, u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|j| {
            let um = if j == 0 { ff.u_left } else { u[j - 1] };
            let up = if j + 1 == n { ff.u_right } else { u[j + 1] };
            (up - um) / (2.0 * dx)
        })
        .collect()
}

/// Exact relaxation half-step: with `E = mu u_x / v` frozen,
/// `s <- E + (s - E) exp(-h/tau)`.
fn relaxation_half_step(config: &SolverConfig, grid: &Grid1D, ff: &FarField, state: &mut State, h: f64) {
    let decay = (-h / config.tau).exp();
    let ux = velocity_gradient(ff, &state.u, grid.dx());
    for j in 0..state.len() {
        let e = config.mu * ux[j] / state.v[j];
        state.s[j] = e + (state.s[j] - e) * decay;
    }
}

/// One Strang-split step of the relaxed system (`tau > 0`).
pub fn step(
    config: &SolverConfig,
    grid: &Grid1D,
    ff: &FarField,
    state: &mut State,
    dt: f64,
) -> Result<BoundaryFlux> {
    if !(config.tau > 0.0) {
        return Err(Error::Domain("step requires tau > 0; use classical_step for tau = 0".into()));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    relaxation_half_step(config, grid, ff, state, 0.5 * dt);
    let flux = hyperbolic_step(
        config,
        grid,
        ff,
        state,
        dt,
        FluxMode::Relaxed { mu: config.mu, tau: config.tau },
    )?;
    relaxation_half_step(config, grid, ff, state, 0.5 * dt);
    state.t += dt;
    Ok(flux)
}

/// One step of the classical limit (`tau = 0`): acoustic flux plus explicit
/// centered diffusion; `s` is refreshed to the diagnostic `mu u_x / v`.
pub fn classical_step(
    config: &SolverConfig,
    grid: &Grid1D,
    ff: &FarField,
    state: &mut State,
    dt: f64,
) -> Result<BoundaryFlux> {
    if config.tau != 0.0 {
        return Err(Error::Domain("classical_step requires tau = 0".into()));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let flux = hyperbolic_step(config, grid, ff, state, dt, FluxMode::Classical { mu: config.mu })?;
    let ux = velocity_gradient(ff, &state.u, grid.dx());
    for j in 0..state.len() {
        state.s[j] = config.mu * ux[j] / state.v[j];
    }
    state.t += dt;
    Ok(flux)
}

/// State plus cumulative boundary inflow at a snapshot instant.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSnapshot {
    pub state: State,
    /// cumulative `∫ (F_left - F_right) dt` for the volume equation
    pub inflow_v: f64,
    /// same for the momentum equation
    pub inflow_u: f64,
}

/// Completed run: snapshots at the requested times (the initial state always
/// leads) and the number of accepted steps.
#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    pub snapshots: Vec<RunSnapshot>,
    pub steps: u64,
}

/// A run aborted by positivity loss; carries everything produced so far.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub time: f64,
    pub partial: RunHistory,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "positivity failure at t = {:.12e}", self.time)
    }
}

/// Why a run did not complete.
#[derive(Debug)]
pub enum RunError {
    /// configuration or state rejected before any stepping
    Invalid(Error),
    /// positivity loss mid-run; partial history attached
    Positivity(Box<RunFailure>),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Invalid(e) => write!(f, "{e}"),
            RunError::Positivity(rf) => write!(f, "{rf}"),
        }
    }
}

impl std::error::Error for RunError {}

pub type Observer<'a> = Box<dyn FnMut(&State) + 'a>;

/// Integrate from the state's time to `t_end`, emitting exact-time snapshots.
///
/// Step sizes follow `cfl_dt` and are clipped to land exactly on snapshot
/// times and on `t_end`. Observers run after every accepted step. The walk is
/// strictly sequential, so identical inputs give bitwise identical output.
pub fn run(
    config: &SolverConfig,
    grid: &Grid1D,
    initial: State,
    observers: &mut [Observer],
) -> std::result::Result<RunHistory, RunError> {
    config.validate().map_err(RunError::Invalid)?;
    if initial.len() != grid.cell_count() {
        return Err(RunError::Invalid(Error::Domain(format!(
            "state has {} cells but grid has {}",
            initial.len(),
            grid.cell_count()
        ))));
    }
    let mut history = RunHistory { snapshots: Vec::new(), steps: 0 };
    let mut state = initial;
    let ff = FarField::from_state(&state);
    let t0 = state.t;
    let mut inflow_v = 0.0;
    let mut inflow_u = 0.0;

    history.snapshots.push(RunSnapshot { state: state.clone(), inflow_v, inflow_u });

    let mut targets: Vec<(f64, bool)> = config
        .snapshot_times
        .iter()
        .filter(|&&ts| ts > t0)
        .map(|&ts| (ts, true))
        .collect();
    if targets.last().map_or(true, |&(ts, _)| ts < config.t_end) {
        targets.push((config.t_end, config.snapshot_times.contains(&config.t_end)));
    }

    for (target, emit) in targets {
        while state.t < target {
            let dt_raw = match cfl_dt(config, grid, &state) {
                Ok(dt) => dt,
                Err(_) => {
                    return Err(RunError::Positivity(Box::new(RunFailure {
                        time: state.t,
                        partial: history,
                    })));
                }
            };
            let remaining = target - state.t;
            let clipped = dt_raw >= remaining * (1.0 - 1e-12);
            let dt = if clipped { remaining } else { dt_raw };
            if !(dt > 0.0) {
                break;
            }
            let res = if config.tau > 0.0 {
                step(config, grid, &ff, &mut state, dt)
            } else {
                classical_step(config, grid, &ff, &mut state, dt)
            };
            match res {
                Ok(flux) => {
                    inflow_v += flux.v_left - flux.v_right;
                    inflow_u += flux.u_left - flux.u_right;
                }
                Err(_) => {
                    return Err(RunError::Positivity(Box::new(RunFailure {
                        time: state.t,
                        partial: history,
                    })));
                }
            }
            if clipped {
                state.t = target;
            }
            history.steps += 1;
            for obs in observers.iter_mut() {
                obs(&state);
            }
        }
        if emit {
            history.snapshots.push(RunSnapshot { state: state.clone(), inflow_v, inflow_u });
        }
    }
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn law() -> PressureLaw {
        PressureLaw::new(1.0, 2.0).unwrap()
    }

    fn config(tau: f64) -> SolverConfig {
        SolverConfig {
            law: law(),
            tau,
            mu: 1.0,
            cfl: 0.5,
            t_end: 1.0,
            snapshot_times: vec![],
            boundary: BoundaryKind::FarFieldFixed,
            order: SchemeOrder::Second,
        }
    }

    fn constant_state(grid: &Grid1D, v: f64, u: f64, s: f64) -> State {
        let n = grid.cell_count();
        State::new(0.0, vec![v; n], vec![u; n], vec![s; n]).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let grid = Grid1D::new(5.0, 100).unwrap();
        assert_relative_eq!(grid.dx(), 0.1, max_relative = 1e-15);
        assert_relative_eq!(grid.center(0), -4.95, max_relative = 1e-12);
        assert_relative_eq!(grid.center(99), 4.95, max_relative = 1e-12);
        for j in 0..50 {
            assert_abs_diff_eq!(grid.center(j) + grid.center(99 - j), 0.0, epsilon = 1e-12);
        }
        assert_eq!(grid.centers().len(), 100);
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(Grid1D::new(0.0, 64).is_err());
        assert!(Grid1D::new(-1.0, 64).is_err());
        assert!(Grid1D::new(1.0, 15).is_err());
        assert!(Grid1D::new(f64::NAN, 64).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(State::new(0.0, vec![1.0; 4], vec![0.0; 3], vec![0.0; 4]).is_err());
        assert!(State::new(0.0, vec![1.0, 0.0, 1.0], vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(State::new(0.0, vec![1.0, -2.0, 1.0], vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(State::new(0.0, vec![1.0; 3], vec![0.0, f64::NAN, 0.0], vec![0.0; 3]).is_err());
        assert!(State::new(0.0, vec![1.0; 3], vec![0.0; 3], vec![0.0; 3]).is_ok());
    }

    #[test]
    fn config_validation() {
        let mut c = config(1.0);
        assert!(c.validate().is_ok());
        c.cfl = 0.0;
        assert!(c.validate().is_err());
        c.cfl = 1.5;
        assert!(c.validate().is_err());
        c = config(-0.1);
        assert!(c.validate().is_err());
        c = config(1.0);
        c.snapshot_times = vec![0.5, 2.0];
        assert!(c.validate().is_err());
        c.snapshot_times = vec![0.5, 0.5];
        assert!(c.validate().is_err());
        c.snapshot_times = vec![0.2, 0.5, 1.0];
        assert!(c.validate().is_ok());
    }

    // dx = 0.01, v = 1, a = 1, gamma = 2, mu = tau = 1, cfl = 0.5:
    // relaxed speed sqrt(1 + 2) so dt = 0.005 / sqrt(3)
    #[test]
    fn cfl_dt_relaxed_example() {
        let grid = Grid1D::new(1.0, 200).unwrap();
        let state = constant_state(&grid, 1.0, 0.0, 0.0);
        let dt = cfl_dt(&config(1.0), &grid, &state).unwrap();
        assert_relative_eq!(dt, 0.005 / 3.0_f64.sqrt(), max_relative = 1e-13);
    }

    // same grid with tau = 0: the diffusive cap 0.25 dx^2 v / mu = 2.5e-5
    // undercuts the acoustic bound 0.005 / sqrt(2)
    #[test]
    fn cfl_dt_classical_diffusion_cap() {
        let grid = Grid1D::new(1.0, 200).unwrap();
        let state = constant_state(&grid, 1.0, 0.0, 0.0);
        let dt = cfl_dt(&config(0.0), &grid, &state).unwrap();
        assert_relative_eq!(dt, 2.5e-5, max_relative = 1e-13);
    }

    #[test]
    fn cfl_dt_halves_when_cells_double() {
        let g1 = Grid1D::new(1.0, 64).unwrap();
        let g2 = Grid1D::new(1.0, 128).unwrap();
        let c = config(1.0);
        let dt1 = cfl_dt(&c, &g1, &constant_state(&g1, 1.2, 0.0, 0.0)).unwrap();
        let dt2 = cfl_dt(&c, &g2, &constant_state(&g2, 1.2, 0.0, 0.0)).unwrap();
        assert_eq!(dt2, 0.5 * dt1);
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let grid = Grid1D::new(2.0, 32).unwrap();
        let c = config(0.7);
        let initial = constant_state(&grid, 1.3, 0.2, 0.0);
        let ff = FarField::from_state(&initial);
        let mut state = initial.clone();
        for _ in 0..10 {
            step(&c, &grid, &ff, &mut state, 0.01).unwrap();
        }
        assert_eq!(state.v, initial.v);
        assert_eq!(state.u, initial.u);
        assert_eq!(state.s, initial.s);
    }

    // with u = 0 the forcing mu u_x / v vanishes, so one split step of size
    // dt decays the stress by exactly exp(-dt/tau)
    #[test]
    fn pure_relaxation_decay() {
        // with u identically zero the strain feedback vanishes and two half
        // steps compose into the exact exponential over the full step
        let grid = Grid1D::new(2.0, 32).unwrap();
        let c = config(1.0);
        let initial = constant_state(&grid, 1.0, 0.0, 1.0);
        let ff = FarField::from_state(&initial);
        let mut state = initial.clone();
        relaxation_half_step(&c, &grid, &ff, &mut state, 0.05);
        relaxation_half_step(&c, &grid, &ff, &mut state, 0.05);
        for &s in &state.s {
            assert_relative_eq!(s, (-0.1f64).exp(), max_relative = 1e-14);
        }
        assert_eq!(state.v, initial.v);
        assert_eq!(state.u, initial.u);
    }

    #[test]
    fn relaxation_fixes_the_local_strain_equilibrium() {
        // s = mu u_x / v is a fixed point of the half-step for any u profile
        let grid = Grid1D::new(2.0, 32).unwrap();
        let c = config(0.7);
        let n = grid.cell_count();
        let v: Vec<f64> = (0..n).map(|j| 1.0 + 0.2 * (grid.center(j)).cos()).collect();
        let u: Vec<f64> = (0..n).map(|j| 0.3 * grid.center(j).sin()).collect();
        let mut state = State::new(0.0, v.clone(), u.clone(), vec![0.0; n]).unwrap();
        let ff = FarField::from_state(&state);
        let ux = velocity_gradient(&ff, &state.u, grid.dx());
        for j in 0..n {
            state.s[j] = c.mu * ux[j] / state.v[j];
        }
        let frozen = state.s.clone();
        relaxation_half_step(&c, &grid, &ff, &mut state, 0.31);
        assert_eq!(state.s, frozen);
    }

    #[test]
    fn step_mode_guards() {
        let grid = Grid1D::new(1.0, 16).unwrap();
        let mut state = constant_state(&grid, 1.0, 0.0, 0.0);
        let ff = FarField::from_state(&state);
        assert!(step(&config(0.0), &grid, &ff, &mut state, 0.01).is_err());
        assert!(classical_step(&config(1.0), &grid, &ff, &mut state, 0.01).is_err());
        assert!(step(&config(1.0), &grid, &ff, &mut state, -0.01).is_err());
    }

    #[test]
    fn classical_step_refreshes_stress_diagnostic() {
        let grid = Grid1D::new(5.0, 64).unwrap();
        let c = config(0.0);
        let n = grid.cell_count();
        let v: Vec<f64> = (0..n).map(|j| 1.0 + 0.1 * (grid.center(j) * 0.5).sin()).collect();
        let u: Vec<f64> = (0..n).map(|j| 0.2 * (-grid.center(j).powi(2)).exp()).collect();
        let mut state = State::new(0.0, v, u, vec![0.0; n]).unwrap();
        let ff = FarField::from_state(&state);
        classical_step(&c, &grid, &ff, &mut state, 1e-4).unwrap();
        let ux = velocity_gradient(&ff, &state.u, grid.dx());
        for j in 0..n {
            assert_relative_eq!(state.s[j], c.mu * ux[j] / state.v[j], max_relative = 1e-14);
        }
    }

    #[test]
    fn run_with_zero_horizon_emits_initial_only() {
        let grid = Grid1D::new(1.0, 16).unwrap();
        let mut c = config(1.0);
        c.t_end = 0.0;
        let initial = constant_state(&grid, 1.0, 0.1, 0.0);
        let hist = run(&c, &grid, initial.clone(), &mut []).unwrap();
        assert_eq!(hist.steps, 0);
        assert_eq!(hist.snapshots.len(), 1);
        assert_eq!(hist.snapshots[0].state, initial);
    }

    #[test]
    fn run_lands_snapshots_exactly() {
        let grid = Grid1D::new(2.0, 32).unwrap();
        let mut c = config(1.0);
        c.t_end = 1.0;
        c.snapshot_times = vec![0.0, 0.37, 1.0];
        let initial = constant_state(&grid, 1.0, 0.0, 0.0);
        let hist = run(&c, &grid, initial, &mut []).unwrap();
        let times: Vec<f64> = hist.snapshots.iter().map(|sn| sn.state.t).collect();
        assert_eq!(times, vec![0.0, 0.37, 1.0]);
    }

    fn bump_state(grid: &Grid1D) -> State {
        let n = grid.cell_count();
        let v = vec![1.0; n];
        let u: Vec<f64> = (0..n).map(|j| 0.1 * (-grid.center(j).powi(2)).exp()).collect();
        State::new(0.0, v, u, vec![0.0; n]).unwrap()
    }

    fn total(q: &[f64], dx: f64) -> f64 {
        q.iter().sum::<f64>() * dx
    }

    #[test]
    fn relaxed_run_conserves_up_to_boundary_flux() {
        let grid = Grid1D::new(10.0, 128).unwrap();
        let mut c = config(0.5);
        c.t_end = 0.5;
        let initial = bump_state(&grid);
        let dx = grid.dx();
        let (v0, u0) = (total(&initial.v, dx), total(&initial.u, dx));
        let hist = run(&c, &grid, initial, &mut []).unwrap();
        let last = hist.snapshots.last().unwrap();
        let dv = total(&last.state.v, dx) - v0 - last.inflow_v;
        let du = total(&last.state.u, dx) - u0 - last.inflow_u;
        assert_abs_diff_eq!(dv / v0.abs().max(1.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(du / u0.abs().max(1.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn classical_run_conserves_up_to_boundary_flux() {
        let grid = Grid1D::new(10.0, 64).unwrap();
        let mut c = config(0.0);
        c.mu = 0.1;
        c.t_end = 0.2;
        let initial = bump_state(&grid);
        let dx = grid.dx();
        let (v0, u0) = (total(&initial.v, dx), total(&initial.u, dx));
        let hist = run(&c, &grid, initial, &mut []).unwrap();
        let last = hist.snapshots.last().unwrap();
        let dv = total(&last.state.v, dx) - v0 - last.inflow_v;
        let du = total(&last.state.u, dx) - u0 - last.inflow_u;
        assert_abs_diff_eq!(dv / v0.abs().max(1.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(du / u0.abs().max(1.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn repeated_runs_are_bitwise_identical() {
        let grid = Grid1D::new(10.0, 64).unwrap();
        let mut c = config(0.3);
        c.t_end = 0.4;
        c.snapshot_times = vec![0.2, 0.4];
        let h1 = run(&c, &grid, bump_state(&grid), &mut []).unwrap();
        let h2 = run(&c, &grid, bump_state(&grid), &mut []).unwrap();
        assert_eq!(h1, h2);
    }

    #[test]
    fn observers_see_every_accepted_step() {
        let grid = Grid1D::new(2.0, 32).unwrap();
        let mut c = config(1.0);
        c.t_end = 0.3;
        let mut count = 0u64;
        let mut last_t = 0.0f64;
        {
            let mut obs: Vec<Observer> = vec![Box::new(|st: &State| {
                count += 1;
                last_t = st.t;
            })];
            run(&c, &grid, constant_state(&grid, 1.0, 0.0, 0.0), &mut obs).unwrap();
        }
        let hist = run(&c, &grid, constant_state(&grid, 1.0, 0.0, 0.0), &mut []).unwrap();
        assert_eq!(count, hist.steps);
        assert!(count > 0);
        assert_eq!(last_t, 0.3);
    }

    // colliding streams crush the center cells within one step, which must
    // surface as a positivity failure carrying the pre-step time
    #[test]
    fn positivity_failure_aborts_with_partial_history() {
        let grid = Grid1D::new(1.0, 64).unwrap();
        let mut c = config(10.0);
        c.mu = 1e-3;
        c.cfl = 0.9;
        c.t_end = 1.0;
        let n = grid.cell_count();
        let u: Vec<f64> = (0..n).map(|j| if j < n / 2 { 100.0 } else { -100.0 }).collect();
        let initial = State::new(0.0, vec![1.0; n], u, vec![0.0; n]).unwrap();
        match run(&c, &grid, initial, &mut []) {
            Err(RunError::Positivity(rf)) => {
                assert_eq!(rf.time, 0.0);
                assert_eq!(rf.partial.snapshots.len(), 1);
            }
            other => panic!("expected positivity failure, got {other:?}"),
        }
    }

    #[test]
    fn run_rejects_mismatched_grid() {
        let grid = Grid1D::new(1.0, 32).unwrap();
        let other = Grid1D::new(1.0, 16).unwrap();
        let initial = constant_state(&other, 1.0, 0.0, 0.0);
        assert!(matches!(run(&config(1.0), &grid, initial, &mut []), Err(RunError::Invalid(_))));
    }
}
