//! Saddle-point tail approximation of the inverse stable density.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Right-tail approximation of IS_{alpha,1} evaluated at theta/alpha:
///
/// ```text
/// IS_{alpha,1}(theta/alpha) ~ c1 theta^{(alpha-1/2)/(1-alpha)}
///                              exp(-c2 theta^{1/(1-alpha)}),
/// c1 = (2 pi alpha (1-alpha))^{-1/2},   c2 = (1-alpha)/alpha.
/// ```
///
/// The exponential factor is exact asymptotically, so log-densities agree
/// for large theta; the prefactor overstates the density by a constant
/// factor alpha^{-1/2} (the asymptotically exact prefactor would be
/// (2 pi (1-alpha))^{-1/2}). Useful as an analytic fallback where the
/// exact quadrature density underflows, where only the log scale matters.
pub fn is_tail_approx(alpha: f64, theta: f64) -> Result<f64> {
    Ok(ln_is_tail_approx(alpha, theta)?.exp())
}

/// Log of [`is_tail_approx`].
pub fn ln_is_tail_approx(alpha: f64, theta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::domain(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let c1 = -0.5 * (2.0 * PI * alpha * (1.0 - alpha)).ln();
    let c2 = (1.0 - alpha) / alpha;
    Ok(c1 + (alpha - 0.5) / (1.0 - alpha) * theta.ln() - c2 * theta.powf(1.0 / (1.0 - alpha)))
}
