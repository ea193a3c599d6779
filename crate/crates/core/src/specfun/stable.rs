//! The strict alpha-plus-stable density via Zolotarev's integral
//! representation, and the inverse stable density built on top of it.
//!
//! With the kernel
//!
//! ```text
//! A(p; a) = [sin(a p) / sin(p)]^{a/(1-a)} * sin((1-a) p) / sin(p),   p in (0, pi),
//! ```
//!
//! the density of the positive stable law with Laplace transform
//! `e^{-beta^a}` is
//!
//! ```text
//! g_a(s) = a s^{1/(a-1)} / (pi (1-a)) * Int_0^pi A(p) exp(-s^{a/(a-1)} A(p)) dp.
//! ```
//!
//! `A` is strictly increasing from `a^{a/(1-a)}(1-a)` to infinity, so the
//! integrand `A e^{-cA}` has a single interior maximum where `A = 1/c`.
//! The quadrature locates that point by bisection and lays geometrically
//! refined Gauss-Legendre panels on both sides of it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::gl30;
use crate::rng::IsPrior;

/// ln A(p; alpha) on (0, pi).
fn ln_kernel(p: f64, alpha: f64) -> f64 {
    let r = alpha / (1.0 - alpha);
    r * ((alpha * p).sin().ln() - p.sin().ln()) + ((1.0 - alpha) * p).sin().ln() - p.sin().ln()
}

const P_LO: f64 = 1e-10;

/// Location of the integrand maximum: the solution of ln A(p) = -ln c,
/// clamped to the integration interval. `lc` is ln c.
fn peak_location(alpha: f64, lc: f64) -> f64 {
    let target = -lc;
    let hi = PI - P_LO;
    if ln_kernel(P_LO, alpha) >= target {
        return P_LO;
    }
    if ln_kernel(hi, alpha) <= target {
        return hi;
    }
    let (mut lo, mut up) = (P_LO, hi);
    for _ in 0..80 {
        let mid = 0.5 * (lo + up);
        if ln_kernel(mid, alpha) < target {
            lo = mid;
        } else {
            up = mid;
        }
    }
    0.5 * (lo + up)
}

/// ln of Int_0^pi A e^{-cA} dp, evaluated with `panels` geometric
/// Gauss-Legendre panels on each side of the integrand peak.
fn ln_zolotarev_integral(alpha: f64, lc: f64, panels: usize) -> f64 {
    let pstar = peak_location(alpha, lc);
    // Scale by the peak value of the exponent ln A - c A.
    let scale = {
        let la = ln_kernel(pstar, alpha);
        la - (lc + la).exp()
    };
    if !scale.is_finite() {
        return f64::NEG_INFINITY;
    }

    let mut pts: Vec<f64> = Vec::with_capacity(2 * panels + 1);
    for k in (1..=panels).rev() {
        let frac = 1e-12f64.powf(1.0 - k as f64 / panels as f64);
        pts.push(pstar + (P_LO - pstar) * frac);
    }
    pts.push(pstar);
    for k in 1..=panels {
        let frac = 1e-12f64.powf(1.0 - k as f64 / panels as f64);
        pts.push(pstar + (PI - P_LO - pstar) * frac);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();

    let rule = gl30();
    let mut total = 0.0;
    for pair in pts.windows(2) {
        let (mid, hw) = (0.5 * (pair[0] + pair[1]), 0.5 * (pair[1] - pair[0]));
        if hw <= 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for &(x, w) in rule {
            let p = mid + hw * x;
            let la = ln_kernel(p, alpha);
            // The exponent is at most `scale` by construction; the min guards
            // against rounding noise when c A is huge (|scale| >> 1/eps),
            // where the cancellation can otherwise produce spurious overflow.
            let expo = (la - (lc + la).exp() - scale).min(0.0);
            if expo > -745.0 {
                acc += w * expo.exp();
            }
        }
        total += hw * acc;
    }
    scale + total.ln()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "stable index alpha must lie in (0,1), got {alpha}"
        )));
    }
    Ok(())
}

/// ln g_alpha(s) at a fixed quadrature resolution. No accuracy check; used
/// where many evaluations at modest tolerance are needed (grid weights).
pub(crate) fn ln_stable_pdf_raw(alpha: f64, s: f64, panels: usize) -> f64 {
    let ln_s = s.ln();
    let lc = alpha / (alpha - 1.0) * ln_s;
    let ln_i = ln_zolotarev_integral(alpha, lc, panels);
    (alpha / (PI * (1.0 - alpha))).ln() + ln_s / (alpha - 1.0) + ln_i
}

/// ln of the stable density with an internal two-resolution accuracy check.
pub fn ln_stable_pdf(alpha: f64, s: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("s must be positive, got {s}")));
    }
    let coarse = ln_stable_pdf_raw(alpha, s, 16);
    let fine = ln_stable_pdf_raw(alpha, s, 24);
    let g = fine.exp();
    let achieved = (fine.exp() - coarse.exp()).abs();
    if achieved > 1e-8 * (1.0 + g) {
        let finer = ln_stable_pdf_raw(alpha, s, 48);
        let achieved = (finer.exp() - fine.exp()).abs();
        if achieved > 1e-8 * (1.0 + finer.exp()) {
            return Err(Error::numeric(format!(
                "stable density quadrature did not converge at alpha={alpha}, s={s}; \
                 achieved tolerance {achieved:.3e}"
            )));
        }
        return Ok(finer);
    }
    Ok(fine)
}

/// Density g_alpha(s) of the strictly positive alpha-stable law.
pub fn stable_pdf(alpha: f64, s: f64) -> Result<f64> {
    Ok(ln_stable_pdf(alpha, s)?.exp())
}

/// ln IS_{alpha,rho}(theta), the inverse stable density of
/// Theta = rho S^{-alpha}:
///
/// ```text
/// IS(theta) = rho^{1/a} theta^{-1-1/a} / a * g_a(rho^{1/a} theta^{-1/a}).
/// ```
pub fn ln_inverse_stable_pdf(prior: &IsPrior, theta: f64) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::domain(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let (a, rho) = (prior.alpha(), prior.rho());
    let ln_s = (rho.ln() - theta.ln()) / a;
    let ln_g = ln_stable_pdf(a, ln_s.exp())?;
    Ok(rho.ln() / a - (1.0 + 1.0 / a) * theta.ln() - a.ln() + ln_g)
}

pub(crate) fn ln_inverse_stable_pdf_raw(alpha: f64, rho: f64, theta: f64, panels: usize) -> f64 {
    let ln_s = (rho.ln() - theta.ln()) / alpha;
    let ln_g = ln_stable_pdf_raw(alpha, ln_s.exp(), panels);
    rho.ln() / alpha - (1.0 + 1.0 / alpha) * theta.ln() - alpha.ln() + ln_g
}

/// Inverse stable density IS_{alpha,rho}(theta).
pub fn inverse_stable_pdf(prior: &IsPrior, theta: f64) -> Result<f64> {
    Ok(ln_inverse_stable_pdf(prior, theta)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_panels, integrate_to_inf};
    use statrs::function::gamma::ln_gamma;

    /// Convergent series representation of g_alpha(s), an independent route
    /// used only as a test oracle. Accurate when s^{-alpha} is not large.
    fn stable_pdf_series(alpha: f64, s: f64) -> f64 {
        let ln_s = s.ln();
        let mut sum = 0.0;
        let mut small_run = 0;
        for k in 1..400 {
            let kf = k as f64;
            let sine = (PI * kf * alpha).sin();
            let ln_mag =
                ln_gamma(alpha * kf + 1.0) - ln_gamma(kf + 1.0) - (alpha * kf + 1.0) * ln_s;
            let term = if k % 2 == 1 { 1.0 } else { -1.0 } * sine * ln_mag.exp();
            sum += term;
            // sin(pi k alpha) vanishes at rational alpha, so one tiny term
            // does not mean convergence; require a run of them.
            if term.abs() < 1e-16 * sum.abs() && k > 4 {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        sum / PI
    }

    fn levy(s: f64) -> f64 {
        // alpha = 1/2 closed form.
        s.powf(-1.5) * (-1.0 / (4.0 * s)).exp() / (2.0 * PI.sqrt())
    }

    #[test]
    fn matches_levy_closed_form() {
        for s in [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e3] {
            let got = stable_pdf(0.5, s).unwrap();
            let want = levy(s);
            assert!(
                (got - want).abs() < 1e-10 * (1.0 + want),
                "s={s}: got {got}, want {want}"
            );
        }
        assert!((stable_pdf(0.5, 1.0).unwrap() - 0.219696).abs() < 1e-6);
    }

    #[test]
    fn matches_series_route() {
        // The f64 series itself suffers alternating-term cancellation at
        // small s (roughly 1e-7 relative there), hence the mixed tolerance.
        for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
            for s in [0.8, 1.5, 3.0, 10.0] {
                let got = stable_pdf(alpha, s).unwrap();
                let want = stable_pdf_series(alpha, s);
                let tol = if s < 2.0 { 2e-6 } else { 1e-8 };
                assert!(
                    (got - want).abs() < tol * (1.0 + want.abs()),
                    "alpha={alpha}, s={s}: quadrature {got}, series {want}"
                );
            }
        }
    }

    #[test]
    fn laplace_transform_at_one() {
        // Int e^{-s} g_{1/2}(s) ds = e^{-1}.
        let inner = integrate_panels(
            |s| {
                if s <= 0.0 {
                    0.0
                } else {
                    (-s).exp() * stable_pdf(0.5, s).unwrap()
                }
            },
            1e-9,
            60.0,
            1e-10,
            64,
        )
        .unwrap();
        assert!((inner - (-1.0f64).exp()).abs() < 1e-6, "got {inner}");
    }

    #[test]
    fn inverse_stable_normalizes_on_grid() {
        for alpha in [0.3, 0.5, 0.8] {
            for rho in [1.0, 4.0] {
                let prior = IsPrior::new(alpha, rho).unwrap();
                let total = integrate_to_inf(
                    |t| inverse_stable_pdf(&prior, t).unwrap_or(0.0),
                    1e-12,
                    1e-9,
                )
                .unwrap();
                assert!(
                    (total - 1.0).abs() < 1e-5,
                    "alpha={alpha}, rho={rho}: total {total}"
                );
            }
        }
    }

    #[test]
    fn origin_limit_is_reciprocal_gamma() {
        // IS_{alpha,rho}(0+) = rho^{-1} / Gamma(1-alpha).
        for (alpha, rho) in [(0.3, 1.0), (0.5, 2.0), (0.8, 0.5)] {
            let prior = IsPrior::new(alpha, rho).unwrap();
            let got = inverse_stable_pdf(&prior, 1e-6).unwrap();
            let want = (1.0 / rho) / ln_gamma(1.0 - alpha).exp();
            assert!(
                (got - want).abs() < 0.01 * want,
                "alpha={alpha}, rho={rho}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(stable_pdf(1.2, 1.0).is_err());
        assert!(stable_pdf(0.5, -1.0).is_err());
    }
}
