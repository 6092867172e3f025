//! Discrete norms, perturbation fields against an approximate wave, entropy
//! functionals with their dissipation balance, error-vs-exact-fan
//! measurements, decay-rate fitting, and conservation ledgers.
//!
//! Spatial convention: Lp/Hk norms use trapezoid end-weights on the
//! cell-center samples; the entropy functionals E1/E2 and the energy
//! ingredients use full-measure cell sums, which reproduce constant-field
//! integrals over [-L, L] exactly. Time integrals are trapezoid over
//! snapshots.

use crate::approx_wave::{ApproxWave, WavePoint};
use crate::error::{Error, Result};
use crate::riemann::{exact_profile, WaveFan};
use crate::solver::{Grid1D, RunHistory, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    LInf,
    H1,
    H2,
}

/// Second-order first derivative: centered inside, one-sided at the ends.
pub fn derivative(q: &[f64], dx: f64) -> Vec<f64> {
    let n = q.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    d[0] = (-3.0 * q[0] + 4.0 * q[1] - q[2]) / (2.0 * dx);
    for j in 1..n - 1 {
        d[j] = (q[j + 1] - q[j - 1]) / (2.0 * dx);
    }
    d[n - 1] = (3.0 * q[n - 1] - 4.0 * q[n - 2] + q[n - 3]) / (2.0 * dx);
    d
}

/// Second-order second derivative: centered inside, one-sided at the ends.
pub fn second_derivative(q: &[f64], dx: f64) -> Vec<f64> {
    let n = q.len();
    let mut d = vec![0.0; n];
    if n < 4 {
        return d;
    }
    let dx2 = dx * dx;
    d[0] = (2.0 * q[0] - 5.0 * q[1] + 4.0 * q[2] - q[3]) / dx2;
    for j in 1..n - 1 {
        d[j] = (q[j + 1] - 2.0 * q[j] + q[j - 1]) / dx2;
    }
    d[n - 1] = (2.0 * q[n - 1] - 5.0 * q[n - 2] + 4.0 * q[n - 3] - q[n - 4]) / dx2;
    d
}

fn trapezoid_weight(j: usize, n: usize, dx: f64) -> f64 {
    if j == 0 || j + 1 == n {
        0.5 * dx
    } else {
        dx
    }
}

fn trap_l1(q: &[f64], dx: f64) -> f64 {
    let n = q.len();
    q.iter().enumerate().map(|(j, x)| trapezoid_weight(j, n, dx) * x.abs()).sum()
}

fn trap_l2_sq(q: &[f64], dx: f64) -> f64 {
    let n = q.len();
    q.iter().enumerate().map(|(j, x)| trapezoid_weight(j, n, dx) * x * x).sum()
}

fn max_abs(q: &[f64]) -> f64 {
    q.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Trapezoid-weighted discrete norm of cell-center samples.
pub fn discrete_norm(q: &[f64], dx: f64, kind: NormKind) -> Result<f64> {
    if !(dx > 0.0) || !dx.is_finite() {
        return Err(Error::Domain(format!("dx must be positive, got {dx}")));
    }
    let min_len = match kind {
        NormKind::L1 | NormKind::L2 => 2,
        NormKind::LInf => 1,
        NormKind::H1 => 3,
        NormKind::H2 => 4,
    };
    if q.len() < min_len {
        return Err(Error::Domain(format!(
            "norm needs at least {min_len} samples, got {}",
            q.len()
        )));
    }
    Ok(match kind {
        NormKind::L1 => trap_l1(q, dx),
        NormKind::L2 => trap_l2_sq(q, dx).sqrt(),
        NormKind::LInf => max_abs(q),
        NormKind::H1 => {
            let d = derivative(q, dx);
            (trap_l2_sq(q, dx) + trap_l2_sq(&d, dx)).sqrt()
        }
        NormKind::H2 => {
            let d = derivative(q, dx);
            let dd = second_derivative(q, dx);
            (trap_l2_sq(q, dx) + trap_l2_sq(&d, dx) + trap_l2_sq(&dd, dx)).sqrt()
        }
    })
}

/// Differences between a state and the approximate wave at the state's time:
/// `phi = v - V`, `psi = u - U`, `s_pert = s - mu U_x / V`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationFields {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub s_pert: Vec<f64>,
}

fn wave_points(wave: &ApproxWave, t: f64, grid: &Grid1D) -> Result<Vec<WavePoint>> {
    (0..grid.cell_count()).map(|j| wave.eval_full(t, grid.center(j))).collect()
}

fn fields_from_points(state: &State, wp: &[WavePoint], mu: f64) -> PerturbationFields {
    let n = wp.len();
    let mut fields = PerturbationFields {
        phi: Vec::with_capacity(n),
        psi: Vec::with_capacity(n),
        s_pert: Vec::with_capacity(n),
    };
    for (j, p) in wp.iter().enumerate() {
        fields.phi.push(state.v[j] - p.v);
        fields.psi.push(state.u[j] - p.u);
        fields.s_pert.push(state.s[j] - mu * p.u_x / p.v);
    }
    fields
}

pub fn perturbation_fields(
    state: &State,
    wave: &ApproxWave,
    mu: f64,
    grid: &Grid1D,
) -> Result<PerturbationFields> {
    check_shapes(state, grid)?;
    let wp = wave_points(wave, state.t, grid)?;
    Ok(fields_from_points(state, &wp, mu))
}

fn check_shapes(state: &State, grid: &Grid1D) -> Result<()> {
    if state.len() != grid.cell_count() {
        return Err(Error::Domain(format!(
            "state has {} cells but grid has {}",
            state.len(),
            grid.cell_count()
        )));
    }
    Ok(())
}

/// Instantaneous ingredients of the energy functional: the combined H2 norm
/// of `(phi, psi, S)` and the dissipation integrand
/// `|(phi_x, psi_x, S_x)|_{H1}^2 + |sqrt(V_t) phi|_{L2}^2 + |S|_{L2}^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIngredients {
    pub h2_total: f64,
    pub dissipation: f64,
}

pub fn energy_ingredients(
    state: &State,
    wave: &ApproxWave,
    mu: f64,
    grid: &Grid1D,
) -> Result<EnergyIngredients> {
    check_shapes(state, grid)?;
    let dx = grid.dx();
    let wp = wave_points(wave, state.t, grid)?;
    let fields = fields_from_points(state, &wp, mu);

    let cell_l2_sq = |q: &[f64]| -> f64 { q.iter().map(|x| x * x).sum::<f64>() * dx };
    let mut h2_sq = 0.0;
    let mut dissipation = 0.0;
    for f in [&fields.phi, &fields.psi, &fields.s_pert] {
        let d = derivative(f, dx);
        let dd = second_derivative(f, dx);
        let (l0, l1, l2) = (cell_l2_sq(f), cell_l2_sq(&d), cell_l2_sq(&dd));
        h2_sq += l0 + l1 + l2;
        dissipation += l1 + l2;
    }
    let weighted_phi_sq: f64 = fields
        .phi
        .iter()
        .zip(&wp)
        .map(|(phi, p)| p.v_t * phi * phi)
        .sum::<f64>()
        * dx;
    dissipation += weighted_phi_sq + cell_l2_sq(&fields.s_pert);
    Ok(EnergyIngredients { h2_total: h2_sq.sqrt(), dissipation })
}

/// Running value of `sup_s |(phi,psi,S)(s)|_{H2} + int_0^t dissipation ds`,
/// fed snapshot by snapshot; the time integral is trapezoid.
#[derive(Debug, Clone, Default)]
pub struct EnergyAccumulator {
    sup_h2: f64,
    integral: f64,
    last: Option<(f64, f64)>,
}

impl EnergyAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feed the ingredients at time `t` (nondecreasing) and get the energy.
    pub fn push(&mut self, t: f64, ing: &EnergyIngredients) -> Result<f64> {
        if let Some((t0, d0)) = self.last {
            if t < t0 {
                return Err(Error::Domain(format!("times must be nondecreasing: {t} after {t0}")));
            }
            self.integral += 0.5 * (t - t0) * (d0 + ing.dissipation);
        }
        self.sup_h2 = self.sup_h2.max(ing.h2_total);
        self.last = Some((t, ing.dissipation));
        Ok(self.value())
    }

    pub fn value(&self) -> f64 {
        self.sup_h2 + self.integral
    }
}

/// The two entropy functionals. `e1` carries the stress term with the
/// state's volume, `tau v S^2 / (2 mu)`; `e1_wave_volume` is the variant
/// with the wave's `V` in its place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyFunctionals {
    pub e1: f64,
    pub e1_wave_volume: f64,
    pub e2: f64,
}

/// Everything the balance check needs at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceSample {
    pub t: f64,
    pub e1: f64,
    pub e2: f64,
    pub rhs: f64,
}

struct SampleParts {
    e1: f64,
    e1_wave_volume: f64,
    e2: f64,
    rhs: f64,
}

/// One pass over the grid computing E1 (both volume variants), E2, and the
/// forcing integral of the balance identity
/// `d/dt E1 + E2 = int (mu psi (U_x/V)_x - psi g_x - tau v S (U_x/V)_t
///                      + tau v_t S^2 / (2 mu))`.
///
/// E2's cross term enters with `+ V_t phi S / V`: that sign (and the minus on
/// the `(U_x/V)_t` forcing term) is what the multiplier derivation produces,
/// and the only combination under which the discrete residual converges to
/// zero under refinement.
fn sample_parts(
    state: &State,
    wave: &ApproxWave,
    tau: f64,
    mu: f64,
    grid: &Grid1D,
) -> Result<SampleParts> {
    check_shapes(state, grid)?;
    if !(mu > 0.0) || !(tau >= 0.0) {
        return Err(Error::Domain(format!("need mu > 0 and tau >= 0, got mu {mu}, tau {tau}")));
    }
    let law = wave.law();
    let a = law.a();
    let gamma = law.gamma();
    let dx = grid.dx();
    let antiderivative = |xi: f64| a * xi.powf(1.0 - gamma) / (1.0 - gamma);
    let u_x_state = derivative(&state.u, dx);

    let mut parts = SampleParts { e1: 0.0, e1_wave_volume: 0.0, e2: 0.0, rhs: 0.0 };
    for j in 0..state.len() {
        let x = grid.center(j);
        let p = wave.eval_full(state.t, x)?;
        let v = state.v[j];
        if !(v > 0.0) {
            return Err(Error::NonpositiveVolume { x });
        }
        let phi = v - p.v;
        let psi = state.u[j] - p.u;
        let s = state.s[j] - mu * p.u_x / p.v;
        let (pv, dpv, _) = law.pressure_derivatives(p.v)?;
        let pval = a * v.powf(-gamma);

        let e1_core = pv * phi - (antiderivative(v) - antiderivative(p.v)) + 0.5 * psi * psi;
        parts.e1 += dx * (e1_core + tau * v * s * s / (2.0 * mu));
        parts.e1_wave_volume += dx * (e1_core + tau * p.v * s * s / (2.0 * mu));

        let convex_gap = pval - pv - dpv * phi;
        parts.e2 += dx * (v * s * s / mu + p.v_t * phi * s / p.v + convex_gap * p.v_t);

        let w_x = (p.u_xx * p.v - p.u_x * p.v_x) / (p.v * p.v);
        let w_t = (p.u_xt * p.v - p.u_x * p.v_t) / (p.v * p.v);
        parts.rhs += dx
            * (mu * psi * w_x - psi * p.g_x - tau * v * s * w_t
                + tau * u_x_state[j] * s * s / (2.0 * mu));
    }
    Ok(parts)
}

pub fn entropy_functionals(
    state: &State,
    wave: &ApproxWave,
    tau: f64,
    mu: f64,
    grid: &Grid1D,
) -> Result<EntropyFunctionals> {
    let p = sample_parts(state, wave, tau, mu, grid)?;
    Ok(EntropyFunctionals { e1: p.e1, e1_wave_volume: p.e1_wave_volume, e2: p.e2 })
}

/// The forcing integral alone (right-hand side of the balance identity).
pub fn dissipation_rhs(
    state: &State,
    wave: &ApproxWave,
    tau: f64,
    mu: f64,
    grid: &Grid1D,
) -> Result<f64> {
    Ok(sample_parts(state, wave, tau, mu, grid)?.rhs)
}

pub fn balance_sample(
    state: &State,
    wave: &ApproxWave,
    tau: f64,
    mu: f64,
    grid: &Grid1D,
) -> Result<BalanceSample> {
    let p = sample_parts(state, wave, tau, mu, grid)?;
    Ok(BalanceSample { t: state.t, e1: p.e1, e2: p.e2, rhs: p.rhs })
}

/// Residual of the balance identity over one snapshot interval: the E1 rate
/// by differencing, E2 and the forcing by endpoint averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceResidual {
    pub t_left: f64,
    pub t_right: f64,
    pub residual: f64,
}

pub fn balance_residuals(samples: &[BalanceSample]) -> Result<Vec<BalanceResidual>> {
    let mut out = Vec::new();
    for pair in samples.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let dt = b.t - a.t;
        if !(dt > 0.0) {
            return Err(Error::Domain("balance samples need strictly increasing times".into()));
        }
        let residual = (b.e1 - a.e1) / dt + 0.5 * (a.e2 + b.e2) - 0.5 * (a.rhs + b.rhs);
        out.push(BalanceResidual { t_left: a.t, t_right: b.t, residual });
    }
    Ok(out)
}

/// Balance residuals across a run's snapshots.
pub fn dissipation_balance(
    history: &RunHistory,
    wave: &ApproxWave,
    tau: f64,
    mu: f64,
    grid: &Grid1D,
) -> Result<Vec<BalanceResidual>> {
    let samples: Result<Vec<BalanceSample>> = history
        .snapshots
        .iter()
        .map(|sn| balance_sample(&sn.state, wave, tau, mu, grid))
        .collect();
    balance_residuals(&samples?)
}

/// Sup-norm distances between a state and the exact self-similar fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupErrors {
    pub v: f64,
    pub u: f64,
    pub s: f64,
}

pub fn rarefaction_error(state: &State, fan: &WaveFan, grid: &Grid1D) -> Result<SupErrors> {
    check_shapes(state, grid)?;
    if !(state.t > 0.0) {
        return Err(Error::Domain(format!(
            "self-similar comparison needs t > 0, state is at t = {}",
            state.t
        )));
    }
    let mut err = SupErrors { v: 0.0, u: 0.0, s: 0.0 };
    for j in 0..state.len() {
        let xi = grid.center(j) / state.t;
        let (vr, ur) = exact_profile(fan, xi)?;
        err.v = err.v.max((state.v[j] - vr).abs());
        err.u = err.u.max((state.u[j] - ur).abs());
        err.s = err.s.max(state.s[j].abs());
    }
    Ok(err)
}

/// Least-squares power-law fit through `(log t, log y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn decay_fit(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 3 {
        return Err(Error::Domain(format!("decay fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(t, y)) = points.iter().find(|&&(t, y)| !(t > 0.0) || !(y > 0.0)) {
        return Err(Error::Domain(format!("decay fit needs t, y > 0; got ({t}, {y})")));
    }
    let xs: Vec<f64> = points.iter().map(|&(t, _)| t.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("decay fit needs at least two distinct times".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit { slope, intercept, r2 })
}

/// Conserved totals and their drift relative to the boundary-flux ledger.
/// Drifts are scaled by `max(1, |initial total|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub total_v: f64,
    pub total_u: f64,
    pub drift_v: f64,
    pub drift_u: f64,
}

pub fn conservation_ledger(history: &RunHistory, grid: &Grid1D) -> Vec<LedgerRow> {
    let dx = grid.dx();
    let total = |q: &[f64]| q.iter().sum::<f64>() * dx;
    let Some(first) = history.snapshots.first() else {
        return Vec::new();
    };
    let (v0, u0) = (total(&first.state.v), total(&first.state.u));
    let (sv, su) = (v0.abs().max(1.0), u0.abs().max(1.0));
    history
        .snapshots
        .iter()
        .map(|sn| {
            let tv = total(&sn.state.v);
            let tu = total(&sn.state.u);
            LedgerRow {
                t: sn.state.t,
                total_v: tv,
                total_u: tu,
                drift_v: (tv - v0 - sn.inflow_v) / sv,
                drift_u: (tu - u0 - sn.inflow_u) / su,
            }
        })
        .collect()
}

/// Decay exponent `min(1/2, 3/2 - 1/q)` attached to the smoothing shape `q`.
pub fn theta_exponent(q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("theta exponent needs q > 0, got {q}")));
    }
    Ok((1.5 - 1.0 / q).min(0.5))
}
