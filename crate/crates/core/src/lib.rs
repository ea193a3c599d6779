//! Bayesian inference with the inverse stable prior for exponential-family
//! rate, inverse-scale, and precision parameters.
//!
//! The prior is the law of `Theta = rho * S^{-alpha}` where `S` is strictly
//! positive alpha-stable. It is conjugate-like for likelihoods of the form
//! `exp(-a theta) theta^b`: every posterior quantity reduces to generalized
//! Mittag-Leffler evaluations, and exact posterior sampling is available by
//! accept-reject from the prior.
//!
//! Modules:
//! - [`rng`]: seeded streams, stable and inverse stable variate generation
//! - [`specfun`]: stable densities, Mittag-Leffler functions, tail asymptotics
//! - [`expfam`]: the exponential-family catalogue and sufficient statistics
//! - [`posterior`]: posterior density/moments and the two samplers
//! - [`predictive`]: prior and posterior predictive distributions
//! - [`hierarchical`]: Gibbs samplers and shrinkage estimators
//! - [`studies`]: simulation-study harness (risk tables, MAD, HPD)

pub mod error;
mod interp;
pub mod expfam;
pub mod hierarchical;
pub mod posterior;
pub mod predictive;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod studies;

pub use error::{Error, Result};
pub use expfam::{Family, ModelSpec, SuffStats};
pub use hierarchical::{GibbsChain, HyperGridSpec, HyperPosterior, KappaSummary, ShrinkageResult};
pub use posterior::{HeavyTailSpec, PosteriorDraws, PosteriorSpec};
pub use predictive::PredictiveSpec;
pub use rng::{IsPrior, RngStream};
pub use specfun::{GmlArgs, GmlEstimate, GmlMethod};
pub use studies::{RiskReport, RiskRow, ShrinkCase, ShrinkMethod, Table2Cell, Table2Config, Table2Row};
