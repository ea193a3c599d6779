//! Prior and posterior predictive distributions of the transformed new
//! observation A* = a(X*).
//!
//! For families whose per-observation exponent b is a constant (everything
//! except Poisson), A* given theta is Gamma(b*, rate theta), so mixing over
//! the prior or posterior of theta gives densities built from the same
//! Mittag-Leffler normalizer shape as the posterior itself:
//!
//! ```text
//! prior:      p(a*)     = b* a*^{b*-1} rho^{b*} E^{b*+1}_{alpha, alpha b* + 1}(-a* rho),
//! posterior:  p(a* | x) ∝ a*^{b*-1} E^{b'+1}_{alpha, alpha b' + 1}(-(a + a*) rho),
//! ```
//!
//! with b' = b* + b.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::expfam::{Family, ModelSpec, SuffStats};
use crate::rng::IsPrior;
use crate::specfun::gml::gml_posterior_norm;

/// Everything a predictive density depends on. `posterior_stats` absent
/// means the prior predictive.
#[derive(Debug, Clone, Copy)]
pub struct PredictiveSpec {
    pub model: ModelSpec,
    pub prior: IsPrior,
    pub posterior_stats: Option<SuffStats>,
    b_star: f64,
}

impl PredictiveSpec {
    pub fn new(
        model: ModelSpec,
        prior: IsPrior,
        posterior_stats: Option<SuffStats>,
    ) -> Result<Self> {
        let b_star = per_observation_b(&model)?;
        Ok(Self {
            model,
            prior,
            posterior_stats,
            b_star,
        })
    }

    /// The single-observation exponent b*.
    pub fn b_star(&self) -> f64 {
        self.b_star
    }
}

/// Per-observation b for families where it is free of the data.
fn per_observation_b(model: &ModelSpec) -> Result<f64> {
    match model.family() {
        Family::Poisson => Err(Error::domain(
            "predictive distributions need b free of the data; the Poisson b is the \
             observation itself"
                .to_string(),
        )),
        Family::HalfNormal | Family::NormalKnownMean => Ok(0.5),
        Family::GammaKnownShape => Ok(model.sigma()),
        _ => Ok(1.0),
    }
}

/// Prior predictive density of A* = a(X*),
/// `p(a*) = b* a*^{b*-1} rho^{b*} E^{b*+1}_{alpha, alpha b* + 1}(-a* rho)`.
pub fn prior_predictive_pdf(spec: &PredictiveSpec, a_star: f64) -> Result<f64> {
    if spec.posterior_stats.is_some() {
        return Err(Error::domain(
            "spec carries observed data; use posterior_predictive_kernel".to_string(),
        ));
    }
    if !(a_star > 0.0) || !a_star.is_finite() {
        return Err(Error::domain(format!(
            "a_star must be positive, got {a_star}"
        )));
    }
    let b = spec.b_star;
    let e = gml_posterior_norm(&spec.prior, b, a_star)?;
    if !(e.value > 0.0) {
        return Err(Error::numeric(format!(
            "Mittag-Leffler estimate nonpositive ({}) in prior predictive",
            e.value
        )));
    }
    let ln_p = b.ln() + (b - 1.0) * a_star.ln() + b * spec.prior.rho().ln() + e.value.ln();
    Ok(ln_p.exp())
}

/// The k-th prior predictive moment,
/// `E (A*)^k = Gamma(b*+k) Gamma(1-k) / [Gamma(b*) rho^k Gamma(1-alpha k)]`,
/// which exists for k < 1 (the theta^{-k} prior moment must be finite).
pub fn prior_predictive_moment(spec: &PredictiveSpec, k: f64) -> Result<f64> {
    if !k.is_finite() || k >= 1.0 {
        return Err(Error::domain(format!(
            "predictive moment of order {k} does not exist; need k < 1"
        )));
    }
    if spec.b_star + k <= 0.0 {
        return Err(Error::domain(format!(
            "predictive moment of order {k} does not exist; need k > -b* = {}",
            -spec.b_star
        )));
    }
    if k == 0.0 {
        return Ok(1.0);
    }
    let (alpha, rho) = (spec.prior.alpha(), spec.prior.rho());
    let ln = ln_gamma(spec.b_star + k) + ln_gamma(1.0 - k)
        - ln_gamma(spec.b_star)
        - k * rho.ln()
        - ln_gamma(1.0 - alpha * k);
    Ok(ln.exp())
}

/// Unnormalized posterior predictive density,
/// `a*^{b*-1} E^{b'+1}_{alpha, alpha b' + 1}(-(a + a*) rho)` with b' = b* + b.
pub fn posterior_predictive_kernel(spec: &PredictiveSpec, a_star: f64) -> Result<f64> {
    let stats = spec.posterior_stats.ok_or_else(|| {
        Error::domain("spec has no observed data; use prior_predictive_pdf".to_string())
    })?;
    if !(a_star > 0.0) || !a_star.is_finite() {
        return Err(Error::domain(format!(
            "a_star must be positive, got {a_star}"
        )));
    }
    let b_prime = spec.b_star + stats.b;
    let e = gml_posterior_norm(&spec.prior, b_prime, stats.a + a_star)?;
    if !(e.value > 0.0) {
        return Err(Error::numeric(format!(
            "Mittag-Leffler estimate nonpositive ({}) in posterior predictive",
            e.value
        )));
    }
    Ok(((spec.b_star - 1.0) * a_star.ln() + e.value.ln()).exp())
}

/// Normalizing constant of [`posterior_predictive_kernel`]. Integrating
/// theta out first collapses the a* integral to a Gamma function, leaving
/// `Gamma(b*) Gamma(b+1) E^{b+1}_{alpha, alpha b+1}(-a rho) / (Gamma(b'+1) rho^{b*})`
/// — one Mittag-Leffler evaluation instead of quadrature over the kernel.
pub fn posterior_predictive_normalizer(spec: &PredictiveSpec) -> Result<f64> {
    let stats = spec.posterior_stats.ok_or_else(|| {
        Error::domain("spec has no observed data; nothing to normalize".to_string())
    })?;
    let b_star = spec.b_star;
    let e = gml_posterior_norm(&spec.prior, stats.b, stats.a)?;
    if !(e.value > 0.0) {
        return Err(Error::numeric(format!(
            "Mittag-Leffler estimate nonpositive ({}) in predictive normalizer",
            e.value
        )));
    }
    let ln = ln_gamma(b_star) + ln_gamma(stats.b + 1.0)
        - ln_gamma(b_star + stats.b + 1.0)
        - b_star * spec.prior.rho().ln()
        + e.value.ln();
    Ok(ln.exp())
}

/// Posterior predictive density with a precomputed
/// [`posterior_predictive_normalizer`].
pub fn posterior_predictive_pdf(
    spec: &PredictiveSpec,
    a_star: f64,
    normalizer: f64,
) -> Result<f64> {
    if !(normalizer > 0.0) || !normalizer.is_finite() {
        return Err(Error::domain(format!(
            "normalizer must be positive, got {normalizer}"
        )));
    }
    Ok(posterior_predictive_kernel(spec, a_star)? / normalizer)
}
