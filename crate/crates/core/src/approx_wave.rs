//! Smooth approximate rarefaction wave `(V, U)` for the full system.
//!
//! Each family's characteristic value is replaced by a smoothed Burgers wave
//! `w_i`; volumes come back through `V_i = lambda_i^{-1}(w_i)` and velocities
//! ride the wave curves. The composite
//!
//! ```text
//!   V = V_1 + V_2 - vbar,   U = U_1 + U_2 - ubar
//! ```
//!
//! satisfies `V_t = U_x` exactly and `U_t + p(V)_x = g(V)_x` with the
//! interaction defect `g(V) = p(V) - p(V_1) - p(V_2) + p(vbar)`. All
//! derivatives through second order are computed by chain rule, not by
//! differencing.

use crate::burgers::SmoothRarefaction;
use crate::error::{Error, Result};
use crate::gaslaw::{Family, PressureLaw};
use crate::riemann::WaveFan;
use crate::solver::{Grid1D, State};

/// One family's wave: a genuine smoothed fan, or a constant when the fan has
/// zero strength (on-curve or trivial data).
#[derive(Debug, Clone)]
enum Component {
    Fan { wave: SmoothRarefaction, family: Family, v_ref: f64, u_ref: f64 },
    Flat { v: f64, u: f64 },
}

/// Pointwise values of one component and the pieces needed for chain-rule
/// derivatives of the composite.
#[derive(Debug, Clone, Copy)]
struct CompPoint {
    v: f64,
    u: f64,
    v_x: f64,
    v_xx: f64,
    w: f64,
    w_x: f64,
}

impl Component {
    fn eval(&self, law: &PressureLaw, t: f64, x: f64) -> Result<CompPoint> {
        match self {
            Component::Flat { v, u } => Ok(CompPoint { v: *v, u: *u, v_x: 0.0, v_xx: 0.0, w: 0.0, w_x: 0.0 }),
            Component::Fan { wave, family, v_ref, u_ref } => {
                let p = wave.evaluate(t, x)?;
                let v = law.inverse_lambda(p.w, *family)?;
                let lp = law.lambda_prime(v, *family)?;
                let lpp = law.lambda_double_prime(v, *family)?;
                let v_x = p.w_x / lp;
                let v_xx = (p.w_xx - lpp * v_x * v_x) / lp;
                let u = u_ref - law.wave_integral(*v_ref, v, *family)?;
                Ok(CompPoint { v, u, v_x, v_xx, w: p.w, w_x: p.w_x })
            }
        }
    }
}

/// Full set of pointwise wave quantities.
///
/// `v_t` and `u_x` are produced by the same arithmetic and compare equal
/// bit-for-bit; `u_xt` is the mixed derivative `(U_x)_t` needed by the
/// energy-balance diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePoint {
    pub v: f64,
    pub u: f64,
    pub v_x: f64,
    pub v_t: f64,
    pub u_x: f64,
    pub u_t: f64,
    pub v_xx: f64,
    pub u_xx: f64,
    pub u_xt: f64,
    pub g: f64,
    pub g_x: f64,
}

/// First-order derivative bundle, the public contract of `derivatives`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveDerivatives {
    pub v_x: f64,
    pub v_t: f64,
    pub u_x: f64,
    pub u_t: f64,
    pub u_xx: f64,
}

/// Gaussian bump `amplitude * exp(-(x - center)^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl Bump {
    fn eval(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.width;
        self.amplitude * (-0.5 * z * z).exp()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() || !self.amplitude.is_finite() || !self.center.is_finite()
        {
            return Err(Error::Domain(format!(
                "{name} bump needs finite parameters and width > 0 (amplitude {}, center {}, width {})",
                self.amplitude, self.center, self.width
            )));
        }
        Ok(())
    }
}

/// Optional initial perturbations added on top of `(V, U, mu U_x / V)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerturbationSpec {
    pub phi: Option<Bump>,
    pub psi: Option<Bump>,
    pub s: Option<Bump>,
}

impl PerturbationSpec {
    fn validate(&self) -> Result<()> {
        if let Some(b) = &self.phi {
            b.validate("phi")?;
        }
        if let Some(b) = &self.psi {
            b.validate("psi")?;
        }
        if let Some(b) = &self.s {
            b.validate("s")?;
        }
        Ok(())
    }
}

/// Smooth approximate double-rarefaction wave.
#[derive(Debug, Clone)]
pub struct ApproxWave {
    law: PressureLaw,
    fan: WaveFan,
    eps: f64,
    q: f64,
    wave1: Component,
    wave2: Component,
}

impl ApproxWave {
    /// Build the two smoothed component waves on the fan's characteristic
    /// intervals, sharing `eps` and `q`.
    pub fn new(law: PressureLaw, fan: WaveFan, eps: f64, q: f64) -> Result<Self> {
        if !(fan.w1_plus < 0.0) || !(fan.w2_minus > 0.0) {
            return Err(Error::Domain(
                "wave fan edges must satisfy w1_plus < 0 < w2_minus".into(),
            ));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Domain(format!("smoothing rate eps must be positive, got {eps}")));
        }
        if !(q > 1.5) || !q.is_finite() {
            return Err(Error::Domain(format!("tail exponent q must exceed 3/2, got {q}")));
        }
        let wave1 = if fan.w1_plus > fan.w1_minus {
            Component::Fan {
                wave: SmoothRarefaction::new(fan.w1_minus, fan.w1_plus, eps, q)?,
                family: Family::One,
                v_ref: fan.data.v_minus,
                u_ref: fan.data.u_minus,
            }
        } else {
            Component::Flat { v: fan.vbar, u: fan.ubar }
        };
        let wave2 = if fan.w2_plus > fan.w2_minus {
            Component::Fan {
                wave: SmoothRarefaction::new(fan.w2_minus, fan.w2_plus, eps, q)?,
                family: Family::Two,
                v_ref: fan.vbar,
                u_ref: fan.ubar,
            }
        } else {
            Component::Flat { v: fan.vbar, u: fan.ubar }
        };
        Ok(Self { law, fan, eps, q, wave1, wave2 })
    }

    pub fn law(&self) -> &PressureLaw {
        &self.law
    }

    pub fn fan(&self) -> &WaveFan {
        &self.fan
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Everything at `(t, x)`: values, chain-rule derivatives, defect.
    pub fn eval_full(&self, t: f64, x: f64) -> Result<WavePoint> {
        let c1 = self.wave1.eval(&self.law, t, x)?;
        let c2 = self.wave2.eval(&self.law, t, x)?;
        let vbar = self.fan.vbar;

        let v = c1.v + c2.v - vbar;
        let u = c1.u + c2.u - self.fan.ubar;
        let v_x = c1.v_x + c2.v_x;
        // per component V_i,t = -w_i V_i,x = U_i,x: one arithmetic path
        let v_t = -c1.w * c1.v_x - c2.w * c2.v_x;
        let u_x = v_t;
        let u_t = c1.w * c1.w * c1.v_x + c2.w * c2.w * c2.v_x;
        let v_xx = c1.v_xx + c2.v_xx;
        let u_xx = -(c1.w_x * c1.v_x + c1.w * c1.v_xx) - (c2.w_x * c2.v_x + c2.w * c2.v_xx);
        let u_xt = (2.0 * c1.w * c1.w_x * c1.v_x + c1.w * c1.w * c1.v_xx)
            + (2.0 * c2.w * c2.w_x * c2.v_x + c2.w * c2.w * c2.v_xx);

        if !(v > 0.0) {
            return Err(Error::Domain(format!("approximate wave volume nonpositive at t={t}, x={x}")));
        }
        let p = |vv: f64| self.law.pressure_derivatives(vv);
        let (pv, dpv, _) = p(v)?;
        let (p1, dp1, _) = p(c1.v)?;
        let (p2, dp2, _) = p(c2.v)?;
        let (pb, _, _) = p(vbar)?;
        let g = pv - p1 - p2 + pb;
        let g_x = dpv * v_x - dp1 * c1.v_x - dp2 * c2.v_x;

        Ok(WavePoint { v, u, v_x, v_t, u_x, u_t, v_xx, u_xx, u_xt, g, g_x })
    }

    /// Wave state `(V, U)` at `(t, x)`.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let p = self.eval_full(t, x)?;
        Ok((p.v, p.u))
    }

    /// First-order derivatives plus `U_xx`.
    pub fn derivatives(&self, t: f64, x: f64) -> Result<WaveDerivatives> {
        let p = self.eval_full(t, x)?;
        Ok(WaveDerivatives { v_x: p.v_x, v_t: p.v_t, u_x: p.u_x, u_t: p.u_t, u_xx: p.u_xx })
    }

    /// Interaction defect `g(V)` and its space derivative.
    pub fn defect(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let p = self.eval_full(t, x)?;
        Ok((p.g, p.g_x))
    }

    /// Largest deviation of `(V, U)(0, ±L)` from the far-field states; the
    /// caller decides whether the truncation is acceptable.
    pub fn far_field_deviation(&self, grid: &Grid1D) -> Result<f64> {
        let d = &self.fan.data;
        let (vl, ul) = self.evaluate(0.0, -grid.half_length())?;
        let (vr, ur) = self.evaluate(0.0, grid.half_length())?;
        Ok((vl - d.v_minus)
            .abs()
            .max((ul - d.u_minus).abs())
            .max((vr - d.v_plus).abs())
            .max((ur - d.u_plus).abs()))
    }

    /// Sample the wave at `t = 0` on `grid`, add the perturbation bumps, and
    /// package the result as solver initial data. The stress field starts at
    /// `mu U_x / V` plus its bump, so zero perturbation means zero initial
    /// stress deviation.
    pub fn build_initial_state(
        &self,
        grid: &Grid1D,
        perturbation: &PerturbationSpec,
        mu: f64,
    ) -> Result<State> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::Domain(format!("viscosity mu must be positive, got {mu}")));
        }
        perturbation.validate()?;
        let n = grid.cell_count();
        let mut v = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        for j in 0..n {
            let x = grid.center(j);
            let p = self.eval_full(0.0, x)?;
            let vj = p.v + perturbation.phi.map_or(0.0, |b| b.eval(x));
            if !(vj > 0.0) {
                return Err(Error::NonpositiveVolume { x });
            }
            v.push(vj);
            u.push(p.u + perturbation.psi.map_or(0.0, |b| b.eval(x)));
            s.push(mu * p.u_x / p.v + perturbation.s.map_or(0.0, |b| b.eval(x)));
        }
        State::new(0.0, v, u, s)
    }
}
