//! Small quadrature helpers used by the smoothing machinery.

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// Recursion stops when the Richardson estimate of the panel error drops
/// below the panel's share of the combined tolerance.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, 60)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let tol = abs_tol.max(rel_tol * (left + right).abs());
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        recurse(f, a, m, fa, flm, fm, left, rel_tol, 0.5 * abs_tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, rel_tol, 0.5 * abs_tol, depth - 1)
    }
}

/// 7-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
const GL7_NODES: [f64; 4] = [
    0.0,
    0.405845151377397166906606412077,
    0.741531185599394439863864773281,
    0.949107912342758524526189684048,
];
const GL7_WEIGHTS: [f64; 4] = [
    0.417959183673469387755102040816,
    0.381830050505118944950369775489,
    0.279705391489276667901467771424,
    0.129484966168869693270611432679,
];

/// Fixed 7-point Gauss-Legendre rule on `[a, b]`; exact through degree 13,
/// used for the cumulative panel sums where the panel width is tiny.
pub(crate) fn gauss7<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = GL7_WEIGHTS[0] * f(c);
    for i in 1..4 {
        let d = h * GL7_NODES[i];
        acc += GL7_WEIGHTS[i] * (f(c - d) + f(c + d));
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_smooth_functions() {
        let got = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13, 1e-15);
        assert!((got - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn gauss7_is_exact_on_polynomials() {
        // degree 9 polynomial, well within the rule's degree-13 exactness
        let f = |x: f64| 3.0 * x.powi(9) - x.powi(4) + 2.0;
        let got = gauss7(&f, -1.0, 2.0);
        let exact = 3.0 * (2f64.powi(10) - 1.0) / 10.0 - (2f64.powi(5) + 1.0) / 5.0 + 2.0 * 3.0;
        assert!((got - exact).abs() < 1e-12 * exact.abs());
    }
}
