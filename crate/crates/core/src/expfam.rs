//! Exponential-family data models whose likelihood in the rate-like
//! parameter theta reduces to the kernel `exp(-a theta) theta^b`.
//!
//! Each family fixes a parameterization in which theta plays the role of a
//! rate, inverse scale, precision, or shape, and the pair `(a, b)` of
//! sufficient statistics below makes the kernel exact. The half-normal row
//! intentionally uses the nonstandard density `(2 sigma / pi) e^{-x^2 sigma^2 / pi}`
//! with theta = sigma^2, because the benchmark tables depend on it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// The supported data models. `theta` always denotes the parameter carrying
/// the inverse stable prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Counts with mean theta.
    Poisson,
    /// Density `x theta e^{-theta x^2 / 2}`, theta = 1/sigma^2.
    Rayleigh,
    /// Density `(2 sigma / pi) e^{-x^2 sigma^2 / pi}`, theta = sigma^2.
    HalfNormal,
    /// Density `2 theta x^{-3} e^{-theta / x^2}`.
    InverseRayleigh,
    /// Rate theta.
    Exponential,
    /// Double exponential about zero with rate theta.
    Laplace,
    /// Density `theta x^{-2} e^{-theta / x}`.
    InverseExponential,
    /// Density `theta e^{-x} (1 + e^{-x})^{-theta - 1}` on the real line.
    SkewLogistic,
    /// Gamma with known shape sigma and rate theta.
    GammaKnownShape,
    /// Density `sigma theta x^{sigma-1} e^{-theta x^sigma}`, known shape sigma.
    WeibullKnownShape,
    /// Normal with known mean mu and precision theta.
    NormalKnownMean,
    /// CDF `(1 - e^{-sigma x})^theta`, known rate sigma, shape theta.
    GeneralizedExponential,
}

impl Family {
    fn needs_nuisance(self) -> bool {
        matches!(
            self,
            Family::GammaKnownShape
                | Family::WeibullKnownShape
                | Family::NormalKnownMean
                | Family::GeneralizedExponential
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Poisson => "poisson",
            Family::Rayleigh => "rayleigh",
            Family::HalfNormal => "half_normal",
            Family::InverseRayleigh => "inverse_rayleigh",
            Family::Exponential => "exponential",
            Family::Laplace => "laplace",
            Family::InverseExponential => "inverse_exponential",
            Family::SkewLogistic => "skew_logistic",
            Family::GammaKnownShape => "gamma_known_shape",
            Family::WeibullKnownShape => "weibull_known_shape",
            Family::NormalKnownMean => "normal_known_mean",
            Family::GeneralizedExponential => "generalized_exponential",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "poisson" => Family::Poisson,
            "rayleigh" => Family::Rayleigh,
            "half_normal" => Family::HalfNormal,
            "inverse_rayleigh" => Family::InverseRayleigh,
            "exponential" => Family::Exponential,
            "laplace" => Family::Laplace,
            "inverse_exponential" => Family::InverseExponential,
            "skew_logistic" => Family::SkewLogistic,
            "gamma_known_shape" => Family::GammaKnownShape,
            "weibull_known_shape" => Family::WeibullKnownShape,
            "normal_known_mean" => Family::NormalKnownMean,
            "generalized_exponential" => Family::GeneralizedExponential,
            other => return Err(Error::domain(format!("unknown model family '{other}'"))),
        })
    }
}

/// A family together with its known nuisance parameter, where one exists
/// (gamma/Weibull shape, normal mean, generalized-exponential rate).
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec {
    family: Family,
    nuisance: Option<f64>,
}

impl ModelSpec {
    pub fn new(family: Family, nuisance: Option<f64>) -> Result<Self> {
        match (family.needs_nuisance(), nuisance) {
            (true, None) => Err(Error::domain(format!(
                "family {} requires a nuisance parameter",
                family.name()
            ))),
            (false, Some(_)) => Err(Error::domain(format!(
                "family {} takes no nuisance parameter",
                family.name()
            ))),
            (true, Some(v)) => {
                let legal = if family == Family::NormalKnownMean {
                    v.is_finite()
                } else {
                    v.is_finite() && v > 0.0
                };
                if !legal {
                    return Err(Error::domain(format!(
                        "nuisance {v} outside the legal domain for {}",
                        family.name()
                    )));
                }
                Ok(Self {
                    family,
                    nuisance: Some(v),
                })
            }
            (false, None) => Ok(Self { family, nuisance: None }),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn nuisance(&self) -> Option<f64> {
        self.nuisance
    }

    pub(crate) fn sigma(&self) -> f64 {
        self.nuisance.expect("nuisance checked at construction")
    }
}

/// Sufficient statistics of the likelihood kernel `exp(-a theta + b ln theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuffStats {
    pub a: f64,
    pub b: f64,
    pub n: u64,
}

impl SuffStats {
    pub fn new(a: f64, b: f64, n: u64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("a must be nonnegative, got {a}")));
        }
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::domain(format!("b must be nonnegative, got {b}")));
        }
        if n == 0 {
            return Err(Error::domain("n must be positive".to_string()));
        }
        Ok(Self { a, b, n })
    }
}

fn bad_datum(family: Family, i: usize, x: f64, need: &str) -> Error {
    Error::data(format!(
        "{} datum at index {i} is {x}; support requires {need}",
        family.name()
    ))
}

/// `ln(1 + e^{-x})` without overflow for very negative `x`.
fn ln1p_exp_neg(x: f64) -> f64 {
    (-x).max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Sufficient statistics `(a, b)` of the data under the model.
pub fn sufficient_stats(model: &ModelSpec, data: &[f64]) -> Result<SuffStats> {
    if data.is_empty() {
        return Err(Error::data("empty data set".to_string()));
    }
    let fam = model.family;
    let n = data.len() as f64;
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for (i, &x) in data.iter().enumerate() {
        if !x.is_finite() {
            return Err(bad_datum(fam, i, x, "a finite value"));
        }
        match fam {
            Family::Poisson => {
                if x < 0.0 || x.fract() != 0.0 {
                    return Err(bad_datum(fam, i, x, "a nonnegative integer count"));
                }
                a += 1.0;
                b += x;
            }
            Family::Rayleigh => {
                if x <= 0.0 {
                    return Err(bad_datum(fam, i, x, "x > 0"));
                }
                a += 0.5 * x * x;
                b += 1.0;
            }
            Family::HalfNormal => {
                if x <= 0.0 {
                    return Err(bad_datum(fam, i, x, "x > 0"));
                }
                a += x * x / PI;
                b += 0.5;
            }
            Family::InverseRayleigh => {
                if x <= 0.0 {
                    return Err(bad_datum(fam, i, x, "x > 0"));
                }
                a += 1.0 / (x * x);
                b += 1.0;
            }
            Family::Exponential => {
                if x <= 0.0 {
                    return Err(bad_datum(fam, i, x, "x > 0"));
                }
                a += x;
                b += 1.0;
            }
            Family::Laplace => {
                a += x.abs();
                b += 1.0;
            }
            Family::InverseExponential => {
                if x <= 0.0 {
                    return Err(bad_datum(fam, i, x, "x > 0"));
                }
                a += 1.0 / x;
                b += 1.0;
            }
            Family::SkewLogistic => {
                a += ln1p_exp_neg(x);
                b += 1.0;
            }
            Family::GammaKnownShape => {
                if x <= 0.0 {
                    return Err(bad_datum(fam, i, x, "x > 0"));
                }
                a += x;
                b += model.sigma();
            }
            Family::WeibullKnownShape => {
                if x <= 0.0 {
                    return Err(bad_datum(fam, i, x, "x > 0"));
                }
                a += x.powf(model.sigma());
                b += 1.0;
            }
            Family::NormalKnownMean => {
                let d = x - model.sigma();
                a += 0.5 * d * d;
                b += 0.5;
            }
            Family::GeneralizedExponential => {
                if x <= 0.0 {
                    return Err(bad_datum(fam, i, x, "x > 0"));
                }
                // -ln(1 - e^{-sigma x})
                a += -(-(-model.sigma() * x).exp()).ln_1p();
            }
        }
    }
    if fam == Family::GeneralizedExponential {
        b = n;
    }
    SuffStats::new(a, b, data.len() as u64)
}

/// The likelihood kernel `-a theta + b ln(theta)` on the log scale.
pub fn loglik_kernel(stats: &SuffStats, theta: f64) -> f64 {
    if stats.b == 0.0 {
        -stats.a * theta
    } else {
        -stats.a * theta + stats.b * theta.ln()
    }
}

/// `n` independent draws from the family at parameter theta.
pub fn sample_data(
    model: &ModelSpec,
    theta: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::domain(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let x = match model.family {
            Family::Poisson => rng.poisson(theta),
            // Inverse CDF: F(x) = 1 - e^{-theta x^2 / 2}.
            Family::Rayleigh => (-2.0 * rng.uniform_open01().ln() / theta).sqrt(),
            Family::HalfNormal => {
                (PI / (2.0 * theta)).sqrt() * rng.standard_normal().abs()
            }
            // Inverse CDF: F(x) = e^{-theta / x^2}.
            Family::InverseRayleigh => (theta / -rng.uniform_open01().ln()).sqrt(),
            Family::Exponential => rng.exponential(theta),
            Family::Laplace => {
                let e = rng.exponential(theta);
                if rng.uniform_open01() < 0.5 {
                    -e
                } else {
                    e
                }
            }
            // Inverse CDF: F(x) = e^{-theta / x}.
            Family::InverseExponential => theta / -rng.uniform_open01().ln(),
            // Inverse CDF of F(x) = (1 + e^{-x})^{-theta}: x = -ln(u^{-1/theta} - 1).
            Family::SkewLogistic => {
                -(rng.uniform_open01().powf(-1.0 / theta) - 1.0).ln()
            }
            Family::GammaKnownShape => rng.gamma(model.sigma(), theta),
            // Inverse CDF: F(x) = 1 - e^{-theta x^sigma}.
            Family::WeibullKnownShape => {
                (-rng.uniform_open01().ln() / theta).powf(1.0 / model.sigma())
            }
            Family::NormalKnownMean => {
                model.sigma() + rng.standard_normal() / theta.sqrt()
            }
            // Inverse CDF of F(x) = (1 - e^{-sigma x})^theta:
            // x = -ln(1 - u^{1/theta}) / sigma.
            Family::GeneralizedExponential => {
                -(-rng.uniform_open01().powf(1.0 / theta)).ln_1p() / model.sigma()
            }
        };
        out.push(x);
    }
    Ok(out)
}

/// Closed-form maximum likelihood estimate `b/a`, the kernel maximizer.
pub fn mle_closed_form(model: &ModelSpec, data: &[f64]) -> Result<f64> {
    let stats = sufficient_stats(model, data)?;
    if stats.a == 0.0 {
        return Err(Error::domain(
            "MLE undefined: sufficient statistic a is zero".to_string(),
        ));
    }
    Ok(stats.b / stats.a)
}
