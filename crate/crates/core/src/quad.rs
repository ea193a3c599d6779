//! Small quadrature toolbox: cached Gauss-Legendre rules and an adaptive
//! Simpson integrator for one-dimensional integrals on finite or
//! half-infinite intervals.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative by recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, w));
    }
    // Mirror for the second half (middle node of odd rules is x = 0).
    let mut full: Vec<(f64, f64)> = out.clone();
    for &(x, w) in out.iter().rev() {
        if x.abs() > 1e-14 {
            full.push((-x, w));
        }
    }
    full.truncate(n);
    full
}

/// Cached 30-point rule; the workhorse order in this crate.
pub fn gl30() -> &'static [(f64, f64)] {
    static GL30: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    GL30.get_or_init(|| gauss_legendre(30))
}

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
/// Non-finite integrand values are treated as zero.
fn gl_composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gl30();
    let h = (b - a) / panels as f64;
    let hw = 0.5 * h;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = a + (i as f64 + 0.5) * h;
        let mut acc = 0.0;
        for &(x, w) in rule {
            let v = f(mid + hw * x);
            if v.is_finite() {
                acc += w * v;
            }
        }
        total += hw * acc;
    }
    total
}

/// Integral of `f` on [a, b] by panel-doubling composite Gauss-Legendre:
/// refine until two successive resolutions agree to `tol * (1 + |I|)`.
/// Deliberately not adaptive-recursive — many integrands here carry their
/// own quadrature noise floor, which sends recursive schemes into
/// pathological subdivision instead of terminating.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_panels(f, a, b, tol, 16)
}

pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> Result<f64> {
    if !(b > a) {
        return Err(Error::domain("integration bounds must satisfy a < b".to_string()));
    }
    let mut n = panels.max(2);
    let mut prev = gl_composite(&f, a, b, n);
    let mut achieved = f64::INFINITY;
    for _ in 0..6 {
        n *= 2;
        let cur = gl_composite(&f, a, b, n);
        achieved = (cur - prev).abs();
        if achieved <= tol * (1.0 + cur.abs()) {
            if !cur.is_finite() {
                return Err(Error::numeric(format!(
                    "quadrature produced a non-finite value on [{a}, {b}]"
                )));
            }
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::numeric(format!(
        "quadrature did not converge on [{a}, {b}]; last refinement changed by {achieved:.3e}"
    )))
}

/// Integral of `f` over (a, infinity) via the substitution x = a + t/(1-t).
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<f64> {
    integrate_panels(
        |t| {
            let om = 1.0 - t;
            let x = a + t / om;
            let v = f(x) / (om * om);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        1e-12,
        1.0 - 1e-12,
        tol,
        32,
    )
}
