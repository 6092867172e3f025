//! Smoothed Burgers rarefaction: monotone initial data built from the
//! normalized integral of `(1 + y^2)^{-q}` and its exact solution by the
//! method of characteristics.
//!
//! The initial profile is
//!
//! ```text
//!   w0(x) = w_hat + w_tilde * k_q * ∫_0^{eps x} (1 + y^2)^{-q} dy,
//! ```
//!
//! with `k_q` chosen so `w0` spans `(w_-, w_+)`. Since `w0' > 0`, the
//! characteristics `x0 + w0(x0) t = x` never cross for `t >= 0` and the
//! solution `w(t, x) = w0(x0(t, x))` is global and smooth.

use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, gauss7};
use std::f64::consts::FRAC_PI_2;

/// Number of panels in the cumulative-integral lookup table.
const TABLE_PANELS: usize = 4096;

/// Normalization constant `k_q = 1 / ∫_0^∞ (1 + y^2)^{-q} dy`, `q > 3/2`.
///
/// Computed by adaptive quadrature after the substitution `y = tan(theta)`,
/// which maps the half line onto `[0, pi/2)` with integrand
/// `cos(theta)^{2q-2}`.
pub fn normalize_kq(q: f64) -> Result<f64> {
    check_q(q)?;
    let integrand = move |th: f64| th.cos().powf(2.0 * q - 2.0);
    let total = adaptive_simpson(&integrand, 0.0, FRAC_PI_2, 1e-13, 1e-15);
    Ok(1.0 / total)
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 1.5) || !q.is_finite() {
        return Err(Error::Domain(format!("tail exponent q must exceed 3/2, got {q}")));
    }
    Ok(())
}

/// Value and first two space derivatives of the smoothed wave, plus the time
/// derivative `w_t = -w w_x` supplied by the Burgers equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersPoint {
    pub w: f64,
    pub w_x: f64,
    pub w_xx: f64,
    pub w_t: f64,
}

/// Smoothed single-family rarefaction wave with end values `w_- < w_+`,
/// smoothing rate `eps > 0` and tail exponent `q > 3/2`.
#[derive(Debug, Clone)]
pub struct SmoothRarefaction {
    w_minus: f64,
    w_plus: f64,
    w_hat: f64,
    w_tilde: f64,
    eps: f64,
    q: f64,
    k_q: f64,
    /// cumulative integral of `cos^{2q-2}` at uniform theta nodes on
    /// [0, pi/2], with the exact integrand as nodal derivative for a C^1
    /// monotone Hermite interpolant
    table_values: Vec<f64>,
    table_derivs: Vec<f64>,
}

impl SmoothRarefaction {
    pub fn new(w_minus: f64, w_plus: f64, eps: f64, q: f64) -> Result<Self> {
        if !(w_minus < w_plus) || !w_minus.is_finite() || !w_plus.is_finite() {
            return Err(Error::Domain(format!(
                "smoothed wave needs w_minus < w_plus, got [{w_minus}, {w_plus}]"
            )));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Domain(format!("smoothing rate eps must be positive, got {eps}")));
        }
        check_q(q)?;

        let n = TABLE_PANELS;
        let h = FRAC_PI_2 / n as f64;
        let integrand = move |th: f64| th.cos().powf(2.0 * q - 2.0);
        let mut values = Vec::with_capacity(n + 1);
        let mut derivs = Vec::with_capacity(n + 1);
        values.push(0.0);
        derivs.push(integrand(0.0));
        let mut acc = 0.0;
        for i in 0..n {
            let a = h * i as f64;
            let b = h * (i + 1) as f64;
            acc += gauss7(&integrand, a, b);
            values.push(acc);
            derivs.push(integrand(b));
        }
        let k_q = 1.0 / acc;

        Ok(Self {
            w_minus,
            w_plus,
            w_hat: 0.5 * (w_plus + w_minus),
            w_tilde: 0.5 * (w_plus - w_minus),
            eps,
            q,
            k_q,
            table_values: values,
            table_derivs: derivs,
        })
    }

    pub fn w_minus(&self) -> f64 {
        self.w_minus
    }

    pub fn w_plus(&self) -> f64 {
        self.w_plus
    }

    pub fn w_hat(&self) -> f64 {
        self.w_hat
    }

    pub fn w_tilde(&self) -> f64 {
        self.w_tilde
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn k_q(&self) -> f64 {
        self.k_q
    }

    /// `∫_0^z (1 + y^2)^{-q} dy` through the Hermite table (`z = tan theta`).
    fn primitive(&self, z: f64) -> f64 {
        let theta = z.abs().atan();
        let n = TABLE_PANELS;
        let h = FRAC_PI_2 / n as f64;
        let total = self.table_values[n];
        let pos = (theta / h).min((n as f64) - 1e-9);
        let i = pos.floor() as usize;
        let s = pos - i as f64;
        let (g0, g1) = (self.table_values[i], self.table_values[i + 1]);
        let (d0, d1) = (self.table_derivs[i], self.table_derivs[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let val = g0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + h * d0 * (s3 - 2.0 * s2 + s)
            + g1 * (-2.0 * s3 + 3.0 * s2)
            + h * d1 * (s3 - s2);
        val.clamp(0.0, total) * z.signum()
    }

    /// Initial profile and its first two derivatives: `(w0, w0', w0'')`.
    pub fn initial_data(&self, x: f64) -> (f64, f64, f64) {
        let z = self.eps * x;
        let scale = self.w_tilde * self.k_q;
        let w0 = self.w_hat + scale * self.primitive(z);
        let shape = (1.0 + z * z).powf(-self.q);
        let d1 = scale * self.eps * shape;
        let d2 = -2.0 * self.q * scale * self.eps * self.eps * z * shape / (1.0 + z * z);
        (w0, d1, d2)
    }

    /// Solve `x0 + w0(x0) t = x` for the characteristic foot point `x0`.
    ///
    /// The map is strictly increasing with derivative `1 + t w0' >= 1`, so a
    /// safeguarded Newton iteration converges; the residual is driven below
    /// `1e-12 (1 + |x|)`.
    pub fn invert_characteristic(&self, t: f64, x: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() || !x.is_finite() {
            return Err(Error::Domain(format!("characteristics need finite t >= 0, got t = {t}, x = {x}")));
        }
        if t == 0.0 {
            return Ok(x);
        }
        let mut lo = x - self.w_plus * t;
        let mut hi = x - self.w_minus * t;
        let tol = 1e-12 * (1.0 + x.abs());
        let g = |x0: f64| {
            let (w0, d1, _) = self.initial_data(x0);
            (x0 + w0 * t - x, 1.0 + d1 * t)
        };
        // a Newton step is taken only while it stays inside the bracket and
        // is at most half the step before last, otherwise bisect; for large t
        // the tails of w0 are nearly flat on both sides and an unguarded
        // Newton ping-pongs between them without tightening the bracket
        let mut x0 = 0.5 * (lo + hi);
        let mut step_old = hi - lo;
        let mut step = step_old;
        for _ in 0..200 {
            let (res, slope) = g(x0);
            if res.abs() <= tol {
                return Ok(x0);
            }
            if res > 0.0 {
                hi = x0;
            } else {
                lo = x0;
            }
            let newton = x0 - res / slope;
            let take_newton =
                newton > lo && newton < hi && 2.0 * res.abs() <= (step_old * slope).abs();
            step_old = step;
            if take_newton {
                step = res / slope;
                x0 = newton;
            } else {
                step = 0.5 * (hi - lo);
                x0 = lo + step;
            }
            if step.abs() <= f64::EPSILON * x0.abs() {
                break;
            }
        }
        let (res, _) = g(x0);
        if res.abs() <= 1e-10 * (1.0 + x.abs()) {
            Ok(x0)
        } else {
            Err(Error::Numerics(format!(
                "characteristic inversion stalled at t = {t}, x = {x} (residual {res:.3e})"
            )))
        }
    }

    /// Solution and derivatives at `(t, x)`:
    /// `w = w0(x0)`, `w_x = w0'/D`, `w_xx = w0''/D^3`, `w_t = -w w_x`, with
    /// `D = 1 + t w0'(x0)`.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<BurgersPoint> {
        let x0 = self.invert_characteristic(t, x)?;
        let (w0, d1, d2) = self.initial_data(x0);
        let d = 1.0 + t * d1;
        let w_x = d1 / d;
        let w_xx = d2 / (d * d * d);
        Ok(BurgersPoint { w: w0, w_x, w_xx, w_t: -w0 * w_x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// Closed form of the primitive for q = 2, the independent oracle:
    /// `∫_0^z (1+y^2)^{-2} dy = z/(2(1+z^2)) + arctan(z)/2`.
    fn primitive_q2(z: f64) -> f64 {
        z / (2.0 * (1.0 + z * z)) + z.atan() / 2.0
    }

    fn symmetric_wave() -> SmoothRarefaction {
        SmoothRarefaction::new(-1.0, 1.0, 0.1, 2.0).unwrap()
    }

    #[test]
    fn normalize_kq_matches_frozen_values() {
        // q = 2: ∫ = pi/4 exactly
        assert!((normalize_kq(2.0).unwrap() - 4.0 / PI).abs() < 1e-10);
        // q = 1.6: frozen from an independent high-precision quadrature
        assert!((normalize_kq(1.6).unwrap() - 1.0597816678672424).abs() < 1e-10);
    }

    #[test]
    fn normalize_kq_rejects_small_exponents() {
        assert!(normalize_kq(1.5).is_err());
        assert!(normalize_kq(0.0).is_err());
        assert!(normalize_kq(f64::NAN).is_err());
    }

    /// Independent check of the normalization without the tan substitution:
    /// direct quadrature on [0, Z] plus the asymptotic tail
    /// `∫_Z^∞ y^{-2q} (1 + y^{-2})^{-q} dy ≈ Z^{1-2q}/(2q-1) - q Z^{-1-2q}/(2q+1)`.
    #[test]
    fn normalize_kq_agrees_with_direct_tail_corrected_quadrature() {
        for &q in &[1.7, 2.0, 2.5, 3.0] {
            let z = 200.0;
            let body = crate::quad::adaptive_simpson(
                &|y: f64| (1.0 + y * y).powf(-q),
                0.0,
                z,
                1e-13,
                1e-16,
            );
            let tail = z.powf(1.0 - 2.0 * q) / (2.0 * q - 1.0) - q * z.powf(-1.0 - 2.0 * q) / (2.0 * q + 1.0);
            let kq = normalize_kq(q).unwrap();
            assert!((kq * (body + tail) - 1.0).abs() < 1e-9, "q = {q}");
        }
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(SmoothRarefaction::new(1.0, -1.0, 0.1, 2.0).is_err());
        assert!(SmoothRarefaction::new(0.0, 0.0, 0.1, 2.0).is_err());
        assert!(SmoothRarefaction::new(-1.0, 1.0, 0.0, 2.0).is_err());
        assert!(SmoothRarefaction::new(-1.0, 1.0, 0.1, 1.5).is_err());
    }

    #[test]
    fn table_total_matches_adaptive_quadrature() {
        for &q in &[1.6, 2.0, 3.5] {
            let w = SmoothRarefaction::new(-1.0, 1.0, 0.5, q).unwrap();
            let kq = normalize_kq(q).unwrap();
            assert!((w.k_q() - kq).abs() <= 1e-10 * kq, "q = {q}");
        }
    }

    #[test]
    fn initial_data_at_origin_and_infinity() {
        let w = symmetric_wave();
        let (w0, d1, d2) = w.initial_data(0.0);
        assert_eq!(w0, 0.0);
        assert_relative_eq!(d1, 1.0 * w.k_q() * 0.1, max_relative = 1e-14);
        assert_eq!(d2, 0.0);
        // far field: within the q-tail bound of the end values
        let (far, _, _) = w.initial_data(1e4);
        assert!(far < 1.0 && 1.0 - far < 1e-8);
        let (far, _, _) = w.initial_data(-1e4);
        assert!(far > -1.0 && far + 1.0 < 1e-8);
    }

    #[test]
    fn initial_data_matches_frozen_fixture() {
        // w∓ = ∓1, eps = 0.1, q = 2 at x = 5: the closed form gives
        // (4/pi) * (0.5/(2*1.25) + arctan(0.5)/2) = 0.5498151442478991
        let w = symmetric_wave();
        let (w0, _, _) = w.initial_data(5.0);
        assert_relative_eq!(w0, 0.5498151442478991, max_relative = 1e-12);
        assert_relative_eq!(w0, (4.0 / PI) * primitive_q2(0.5), max_relative = 1e-12);
    }

    #[test]
    fn primitive_matches_closed_form_for_q2() {
        let w = SmoothRarefaction::new(0.0, 2.0, 1.0, 2.0).unwrap();
        // w0(x) = 1 + k_2 * F(x), so F(x) = (w0(x) - 1) / k_2
        for &x in &[-30.0, -4.0, -1.0, -0.01, 0.0, 0.3, 2.0, 17.0, 300.0] {
            let (w0, _, _) = w.initial_data(x);
            let f = (w0 - 1.0) / w.k_q();
            assert!((f - primitive_q2(x)).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn initial_derivatives_agree_with_finite_differences() {
        let w = SmoothRarefaction::new(-0.7, 0.4, 0.3, 1.8).unwrap();
        for &x in &[-5.0, -0.4, 0.0, 1.3, 8.0] {
            let h = 1e-5;
            let f = |y: f64| w.initial_data(y).0;
            let fd1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let fd2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            let (_, d1, d2) = w.initial_data(x);
            assert_relative_eq!(d1, fd1, max_relative = 1e-7, epsilon = 1e-12);
            assert!((d2 - fd2).abs() < 1e-5 * (1.0 + fd2.abs()));
        }
    }

    #[test]
    fn inversion_is_identity_at_t0_and_symmetric_at_origin() {
        let w = symmetric_wave();
        assert_eq!(w.invert_characteristic(0.0, 3.7).unwrap(), 3.7);
        // odd initial data: x0(t, 0) = 0
        assert!(w.invert_characteristic(25.0, 0.0).unwrap().abs() < 1e-12);
        assert!(w.invert_characteristic(-1.0, 0.0).is_err());
    }

    #[test]
    fn inversion_matches_frozen_fixture() {
        // root of x0 + 10 w0(x0) = 3, frozen from a high-precision bisection
        let w = symmetric_wave();
        let x0 = w.invert_characteristic(10.0, 3.0).unwrap();
        assert_relative_eq!(x0, 1.328317296372657, max_relative = 1e-10);
    }

    #[test]
    fn inversion_residual_is_small_everywhere() {
        let w = SmoothRarefaction::new(-0.9, 1.3, 0.7, 1.7).unwrap();
        for k in 0..200 {
            let t = (k % 14) as f64 * 7.3;
            let x = -40.0 + (k as f64) * 0.4;
            let x0 = w.invert_characteristic(t, x).unwrap();
            let res = x0 + w.initial_data(x0).0 * t - x;
            assert!(res.abs() <= 1e-10 * (1.0 + x.abs()), "t={t} x={x}");
        }
    }

    #[test]
    fn evaluate_at_t0_matches_initial_data() {
        let w = symmetric_wave();
        for &x in &[-11.0, -0.5, 0.0, 2.2, 60.0] {
            let p = w.evaluate(0.0, x).unwrap();
            let (w0, d1, d2) = w.initial_data(x);
            assert_eq!(p.w, w0);
            assert_eq!(p.w_x, d1);
            assert_eq!(p.w_xx, d2);
        }
    }

    #[test]
    fn evaluate_approaches_the_sharp_fan() {
        let w = symmetric_wave();
        // along the ray xi = 0.5 the gap to the sharp fan closes like 1/t
        let near = w.evaluate(100.0, 50.0).unwrap();
        let far = w.evaluate(1000.0, 500.0).unwrap();
        assert!((far.w - 0.5).abs() < 0.01);
        assert!((far.w - 0.5).abs() < 0.2 * (near.w - 0.5).abs());
    }

    #[test]
    fn evaluate_keeps_strict_bounds_and_positive_slope() {
        let w = symmetric_wave();
        for k in 0..500 {
            let t = (k / 50) as f64 * 20.0;
            let x = -125.0 + (k % 50) as f64 * 5.1;
            let p = w.evaluate(t, x).unwrap();
            assert!(p.w > -1.0 && p.w < 1.0, "bounds violated at t={t} x={x}");
            assert!(p.w_x > 0.0, "slope not positive at t={t} x={x}");
        }
    }

    /// Centered finite differences of `evaluate` converge to zero residual
    /// `w_t + w w_x` at second order.
    #[test]
    fn pde_residual_vanishes_under_refinement() {
        let w = SmoothRarefaction::new(-0.8, 0.9, 0.4, 2.0).unwrap();
        let sample = |h: f64| -> f64 {
            let mut worst: f64 = 0.0;
            for &(t, x) in &[(1.0, 0.3), (4.0, -2.0), (9.0, 5.0)] {
                let wt = (w.evaluate(t + h, x).unwrap().w - w.evaluate(t - h, x).unwrap().w) / (2.0 * h);
                let wx = (w.evaluate(t, x + h).unwrap().w - w.evaluate(t, x - h).unwrap().w) / (2.0 * h);
                let wc = w.evaluate(t, x).unwrap().w;
                worst = worst.max((wt + wc * wx).abs());
            }
            worst
        };
        let (r1, r2) = (sample(1e-2), sample(5e-3));
        let order = (r1 / r2).log2();
        assert!(order > 1.8, "insufficient FD residual order: {order}");
    }

    /// Spatial derivative fields returned by `evaluate` agree with finite
    /// differences of the solution itself.
    #[test]
    fn solution_derivatives_agree_with_finite_differences() {
        let w = SmoothRarefaction::new(-1.2, 0.6, 0.25, 2.5).unwrap();
        let h = 1e-4;
        for &(t, x) in &[(0.5, 0.0), (3.0, 1.7), (12.0, -6.0)] {
            let p = w.evaluate(t, x).unwrap();
            let wp = w.evaluate(t, x + h).unwrap().w;
            let wm = w.evaluate(t, x - h).unwrap().w;
            let wc = p.w;
            assert_relative_eq!(p.w_x, (wp - wm) / (2.0 * h), max_relative = 1e-6, epsilon = 1e-10);
            assert!((p.w_xx - (wp - 2.0 * wc + wm) / (h * h)).abs() < 1e-4 * (1.0 + p.w_xx.abs()));
            let wt_p = w.evaluate(t + h, x).unwrap().w;
            let wt_m = w.evaluate(t - h, x).unwrap().w;
            assert_relative_eq!(p.w_t, (wt_p - wt_m) / (2.0 * h), max_relative = 1e-5, epsilon = 1e-10);
        }
    }

    /// Sup distance to the sharp fan shrinks along t in {10, 100, 1000}.
    #[test]
    fn sup_distance_to_sharp_fan_decreases() {
        let w = SmoothRarefaction::new(-0.5, 0.5, 1.0, 2.0).unwrap();
        let sup_err = |t: f64| -> f64 {
            let mut worst: f64 = 0.0;
            for k in 0..=800 {
                let x = -1.2 * t + 2.4 * t * (k as f64) / 800.0;
                let wv = w.evaluate(t, x).unwrap().w;
                let fan = (x / t).clamp(-0.5, 0.5);
                worst = worst.max((wv - fan).abs());
            }
            worst
        };
        let (e1, e2, e3) = (sup_err(10.0), sup_err(100.0), sup_err(1000.0));
        assert!(e1 > e2 && e2 > e3, "sup errors not decreasing: {e1} {e2} {e3}");
    }
}
