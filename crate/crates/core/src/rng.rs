//! Seeded, stream-splittable random number generation and stable /
//! inverse-stable variate sampling.
//!
//! Streams are backed by ChaCha8, a counter-based generator: the same
//! `(seed, stream_id)` pair always reproduces the same draw sequence, and
//! distinct stream ids give independent sequences, so replications can be
//! farmed out across threads deterministically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Hyperparameters of the inverse stable prior: tail index `alpha` in (0,1)
/// and scale `rho` > 0. As `alpha` approaches 1 the prior degenerates to a
/// point mass at `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsPrior {
    alpha: f64,
    rho: f64,
}

impl IsPrior {
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie strictly in (0,1), got {alpha}"
            )));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::domain(format!("rho must be positive, got {rho}")));
        }
        Ok(IsPrior { alpha, rho })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// A reproducible RNG stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream with the same seed and a different stream id.
    pub fn substream(&self, stream_id: u64) -> Self {
        RngStream::new(self.seed, stream_id)
    }

    /// Uniform on the open interval (0,1); exact endpoint hits are resampled
    /// so downstream `ln` and `sin` calls never see 0 or 1.
    pub fn uniform_open01(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 && u < 1.0 {
                return u;
            }
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(rand_distr::StandardNormal)
    }

    /// Exponential with the given rate.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform_open01().ln() / rate
    }

    pub fn gamma(&mut self, shape: f64, rate: f64) -> f64 {
        let g = rand_distr::Gamma::new(shape, 1.0 / rate).expect("valid gamma parameters");
        self.rng.sample(g)
    }

    pub fn poisson(&mut self, mean: f64) -> f64 {
        let p = rand_distr::Poisson::new(mean).expect("valid poisson mean");
        self.rng.sample(p)
    }

    /// log of a strictly positive alpha-stable variate `S` with Laplace
    /// transform `E e^{-beta S} = e^{-beta^alpha}`.
    ///
    /// Kanter's representation: with `U` uniform on (0,1) and `W`
    /// standard exponential,
    ///
    /// ```text
    /// S = sin(a pi U) [sin((1-a) pi U)]^{1/a - 1}
    ///     / ( [sin(pi U)]^{1/a} W^{1/a - 1} ).
    /// ```
    ///
    /// Returned on the log scale: for small `alpha` the variate overflows
    /// f64 while its log stays modest, and every consumer in this crate
    /// only needs `S^{-alpha}` or `ln S`.
    pub fn ln_alpha_stable(&mut self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "stable index alpha must lie in (0,1), got {alpha}"
            )));
        }
        let u = self.uniform_open01();
        let w = -self.uniform_open01().ln();
        Ok(Self::ln_alpha_stable_at(alpha, u, w))
    }

    /// Deterministic Chambers-Mellows-Stuck map from a uniform `u` in (0,1) and a
    /// standard exponential `w` to `ln S` where `S` is positive alpha-stable.
    /// Exposed so callers can reuse one batch of (u, w) pairs across many alpha
    /// values (common random numbers for grid searches). `alpha` must be in (0,1).
    pub fn ln_alpha_stable_at(alpha: f64, u: f64, w: f64) -> f64 {
        let inv = 1.0 / alpha;
        (alpha * PI * u).sin().ln() + (inv - 1.0) * ((1.0 - alpha) * PI * u).sin().ln()
            - inv * (PI * u).sin().ln()
            - (inv - 1.0) * w.ln()
    }

    /// Strictly positive alpha-stable variate. May overflow to infinity for
    /// very small `alpha`; use [`RngStream::ln_alpha_stable`] in that regime.
    pub fn sample_alpha_stable(&mut self, alpha: f64) -> Result<f64> {
        Ok(self.ln_alpha_stable(alpha)?.exp())
    }

    /// log of an inverse stable variate `Theta = rho * S^{-alpha}`.
    pub fn ln_inverse_stable(&mut self, prior: &IsPrior) -> f64 {
        let ln_s = self
            .ln_alpha_stable(prior.alpha())
            .expect("prior alpha validated at construction");
        prior.rho().ln() - prior.alpha() * ln_s
    }

    /// Inverse stable variate `Theta = rho * S^{-alpha}`; strictly positive.
    pub fn sample_inverse_stable(&mut self, prior: &IsPrior) -> f64 {
        self.ln_inverse_stable(prior).exp()
    }
}
