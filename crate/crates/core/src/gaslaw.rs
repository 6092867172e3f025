//! Gamma-law pressure and the characteristic structure it induces.
//!
//! Everything here is written in Lagrangian (mass) coordinates: `v` is the
//! specific volume, `p(v) = a v^{-gamma}`, and the two acoustic families
//! travel at `∓sqrt(-p'(v))`.

use crate::error::{Error, Result};

/// Characteristic family of the isentropic system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Backward family, speed `lambda_1 = -sqrt(-p'(v)) < 0`.
    One,
    /// Forward family, speed `lambda_2 = +sqrt(-p'(v)) > 0`.
    Two,
}

impl Family {
    fn sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Two => 1.0,
        }
    }
}

/// Pressure law `p(v) = a v^{-gamma}` with `a > 0`, `gamma > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureLaw {
    a: f64,
    gamma: f64,
}

impl PressureLaw {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("pressure coefficient a must be positive, got {a}")));
        }
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("adiabatic exponent gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { a, gamma })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn check_volume(&self, v: f64) -> Result<()> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("specific volume must be positive, got {v}")));
        }
        Ok(())
    }

    /// `(p, p', p'')` at `v`.
    pub fn pressure_derivatives(&self, v: f64) -> Result<(f64, f64, f64)> {
        self.check_volume(v)?;
        let (a, g) = (self.a, self.gamma);
        let p = a * v.powf(-g);
        let dp = -a * g * v.powf(-g - 1.0);
        let ddp = a * g * (g + 1.0) * v.powf(-g - 2.0);
        Ok((p, dp, ddp))
    }

    /// Characteristic speed `lambda_i(v) = ∓sqrt(-p'(v))`.
    pub fn lambda(&self, v: f64, family: Family) -> Result<f64> {
        self.check_volume(v)?;
        Ok(family.sign() * self.lambda_abs(v))
    }

    /// `|lambda(v)| = sqrt(a gamma) v^{-(gamma+1)/2}`, positive for v > 0.
    fn lambda_abs(&self, v: f64) -> f64 {
        (self.a * self.gamma).sqrt() * v.powf(-0.5 * (self.gamma + 1.0))
    }

    /// `d lambda_i / dv`. Positive for family 1, negative for family 2.
    pub fn lambda_prime(&self, v: f64, family: Family) -> Result<f64> {
        self.check_volume(v)?;
        let g = self.gamma;
        let mag = (self.a * g).sqrt() * 0.5 * (g + 1.0) * v.powf(-0.5 * (g + 3.0));
        Ok(-family.sign() * mag)
    }

    /// `d^2 lambda_i / dv^2`. Negative for family 1, positive for family 2.
    pub fn lambda_double_prime(&self, v: f64, family: Family) -> Result<f64> {
        self.check_volume(v)?;
        let g = self.gamma;
        let mag = (self.a * g).sqrt() * 0.25 * (g + 1.0) * (g + 3.0) * v.powf(-0.5 * (g + 5.0));
        Ok(family.sign() * mag)
    }

    /// `∫_{v0}^{v1} lambda_i(s) ds` in closed form.
    ///
    /// For family 2 this is `(2 sqrt(a gamma)/(gamma-1)) (v0^{-(gamma-1)/2} -
    /// v1^{-(gamma-1)/2})`; family 1 is its negative.
    pub fn wave_integral(&self, v0: f64, v1: f64, family: Family) -> Result<f64> {
        self.check_volume(v0)?;
        self.check_volume(v1)?;
        let g = self.gamma;
        let beta = 0.5 * (g - 1.0);
        let kappa = 2.0 * (self.a * g).sqrt() / (g - 1.0);
        Ok(family.sign() * kappa * (v0.powf(-beta) - v1.powf(-beta)))
    }

    /// Invert `lambda_i` on `v > 0`: `v = (|w| / sqrt(a gamma))^{-2/(gamma+1)}`.
    ///
    /// `w` must carry the family's sign (negative for family 1, positive for
    /// family 2).
    pub fn inverse_lambda(&self, w: f64, family: Family) -> Result<f64> {
        if !w.is_finite() || w * family.sign() <= 0.0 {
            return Err(Error::Domain(format!(
                "characteristic value {w} has the wrong sign for family {}",
                match family {
                    Family::One => 1,
                    Family::Two => 2,
                }
            )));
        }
        let g = self.gamma;
        Ok((w.abs() / (self.a * g).sqrt()).powf(-2.0 / (g + 1.0)))
    }

    /// Largest characteristic speed of the relaxed quasilinear system,
    /// `c(v) = sqrt(mu/(tau v) - p'(v))`.
    ///
    /// The full 3x3 system has speeds `{0, ±c}`; `c` strictly dominates the
    /// acoustic speed `|lambda|` whenever `mu, tau > 0` (subcharacteristic
    /// gap).
    pub fn relaxed_char_speed(&self, mu: f64, tau: f64, v: f64) -> Result<f64> {
        self.check_volume(v)?;
        if !(mu > 0.0) || !(tau > 0.0) {
            return Err(Error::Domain(format!(
                "relaxed speed needs mu > 0 and tau > 0, got mu = {mu}, tau = {tau}"
            )));
        }
        let (_, dp, _) = self.pressure_derivatives(v)?;
        Ok((mu / (tau * v) - dp).sqrt())
    }
}
