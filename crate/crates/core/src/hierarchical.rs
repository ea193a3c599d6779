//! Hierarchical models built on the inverse stable mixing distribution:
//! marginal priors, normal-normal and Poisson-exponential Gibbs samplers,
//! global/local shrinkage with an inverted-beta baseline, the induced
//! shrinkage-factor density, and the full count model with a stable
//! hyperprior on (alpha, rho) sampled over a grid.

use crate::error::{Error, Result};
use crate::interp::Spline;
use crate::expfam::SuffStats;
use crate::posterior::{posterior_sample_ar, PosteriorSpec};
use crate::quad;
use crate::rng::{IsPrior, RngStream};
use crate::specfun::{gml_posterior_norm, ln_inverse_stable_pdf, ln_is_tail_approx, ln_stable_pdf};

/// Proposal budget per accept-reject draw inside the Gibbs samplers.
const GIBBS_AR_BUDGET: u64 = 5_000_000;

/// Log-density floor; anything below contributes zero weight in f64.
const LN_FLOOR: f64 = -750.0;

/// Weighted mean and quantiles of the shrinkage factor kappa = theta/(1+theta).
#[derive(Debug, Clone, Copy)]
pub struct KappaSummary {
    pub mean: f64,
    pub q025: f64,
    pub median: f64,
    pub q975: f64,
}

/// Output of the shrinkage estimators.
#[derive(Debug, Clone)]
pub struct ShrinkageResult {
    /// E(Lambda_i | data), one entry per observation.
    pub posterior_means: Vec<f64>,
    pub kappa_summary: KappaSummary,
    /// Monte Carlo (or quadrature) estimate of the weight-function normalizer.
    pub normalizer: f64,
    /// Effective sample size of the self-normalized weights.
    pub ess: f64,
    /// Set when the effective sample size drops below 50.
    pub weight_degeneracy: bool,
}

/// Grid posterior over the hyperparameters (alpha, rho).
#[derive(Debug, Clone)]
pub struct HyperPosterior {
    /// Flattened grid, row-major in alpha.
    pub grid: Vec<(f64, f64)>,
    /// Conditional grid weights averaged over the kept iterations; sums to 1.
    pub weights: Vec<f64>,
    /// Sampled (alpha, rho) pairs from the kept iterations.
    pub draws: Vec<(f64, f64)>,
}

/// Aligned draws from a Gibbs run. Fixed-hyperparameter samplers repeat the
/// prior's (alpha, rho) so the three lists always have equal length.
#[derive(Debug, Clone)]
pub struct GibbsChain {
    pub lambda_draws: Vec<f64>,
    pub theta_draws: Vec<f64>,
    pub hyper_draws: Vec<(f64, f64)>,
    pub burn_in: usize,
}

impl GibbsChain {
    pub fn kept_lambda(&self) -> &[f64] {
        &self.lambda_draws[self.burn_in..]
    }

    pub fn kept_theta(&self) -> &[f64] {
        &self.theta_draws[self.burn_in..]
    }

    pub fn kept_hyper(&self) -> &[(f64, f64)] {
        &self.hyper_draws[self.burn_in..]
    }
}

fn check_chain_lengths(iters: usize, burn_in: usize) -> Result<()> {
    if iters == 0 || burn_in >= iters {
        return Err(Error::domain(format!(
            "need iters > burn_in > -1, got iters = {iters}, burn_in = {burn_in}"
        )));
    }
    Ok(())
}

fn logsumexp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Unnormalized marginal prior kernel for a latent with likelihood kernel
/// `exp(-g(lambda) theta + b ln theta)` mixed over the inverse stable prior:
/// the Mittag-Leffler factor E^{b+1}_{alpha, alpha b + 1}(-g(lambda) rho).
pub fn marginal_prior_kernel(g_value: f64, b: f64, prior: &IsPrior) -> Result<f64> {
    if !(g_value >= 0.0) || !g_value.is_finite() {
        return Err(Error::domain(format!(
            "g_value must be nonnegative, got {g_value}"
        )));
    }
    Ok(gml_posterior_norm(prior, b, g_value)?.value)
}

/// Gibbs sampler for the normal-normal model: X_j | lambda ~ N(lambda, 1),
/// Lambda | theta ~ N(0, 1/theta), Theta ~ IS. Alternates
/// Lambda | theta ~ N(xbar / (1 + theta/n), 1/(n + theta)) with an
/// accept-reject draw of Theta | lambda (a = lambda^2/2, b = 1/2).
pub fn gibbs_normal_normal(
    xbar: f64,
    n: u64,
    prior: &IsPrior,
    iters: usize,
    burn_in: usize,
    rng: &mut RngStream,
) -> Result<GibbsChain> {
    check_chain_lengths(iters, burn_in)?;
    if n == 0 {
        return Err(Error::domain("n must be positive".to_string()));
    }
    let nf = n as f64;
    let hyper = (prior.alpha(), prior.rho());
    let mut theta = prior.rho();
    let mut lambda_draws = Vec::with_capacity(iters);
    let mut theta_draws = Vec::with_capacity(iters);
    for _ in 0..iters {
        let mean = xbar / (1.0 + theta / nf);
        let lambda = mean + rng.standard_normal() / (nf + theta).sqrt();
        let spec = PosteriorSpec::new(SuffStats::new(lambda * lambda / 2.0, 0.5, 1)?, *prior);
        theta = posterior_sample_ar(&spec, 1, GIBBS_AR_BUDGET, rng)?.draws[0];
        lambda_draws.push(lambda);
        theta_draws.push(theta);
    }
    Ok(GibbsChain {
        lambda_draws,
        theta_draws,
        hyper_draws: vec![hyper; iters],
        burn_in,
    })
}

/// Gibbs sampler for the Poisson-exponential model: X_j | lambda ~
/// Poisson(lambda), Lambda | theta ~ Exp(theta), Theta ~ IS. Alternates
/// Lambda | theta ~ Gamma(sum x + 1, n + theta) with an accept-reject draw
/// of Theta | lambda (a = lambda, b = 1).
pub fn gibbs_poisson_exponential(
    counts: &[u64],
    prior: &IsPrior,
    iters: usize,
    burn_in: usize,
    rng: &mut RngStream,
) -> Result<GibbsChain> {
    check_chain_lengths(iters, burn_in)?;
    if counts.is_empty() {
        return Err(Error::data("empty count vector".to_string()));
    }
    let n = counts.len() as f64;
    let w: f64 = counts.iter().map(|&c| c as f64).sum();
    let hyper = (prior.alpha(), prior.rho());
    let mut theta = prior.rho();
    let mut lambda_draws = Vec::with_capacity(iters);
    let mut theta_draws = Vec::with_capacity(iters);
    for _ in 0..iters {
        let lambda = rng.gamma(w + 1.0, n + theta);
        let spec = PosteriorSpec::new(SuffStats::new(lambda, 1.0, counts.len() as u64)?, *prior);
        theta = posterior_sample_ar(&spec, 1, GIBBS_AR_BUDGET, rng)?.draws[0];
        lambda_draws.push(lambda);
        theta_draws.push(theta);
    }
    Ok(GibbsChain {
        lambda_draws,
        theta_draws,
        hyper_draws: vec![hyper; iters],
        burn_in,
    })
}

/// Self-normalized importance sampling over IS_{alpha,1} proposals. The
/// log-weight closure receives (ln theta, ln(1+theta)); returns the kappa
/// draws, normalized weights, E[(1+theta)^{-1}], the effective sample size,
/// and the Monte Carlo normalizer estimate.
fn snis_kappa<F: Fn(f64, f64) -> f64>(
    alpha: f64,
    n_draws: usize,
    log_weight: F,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, Vec<f64>, f64, f64, f64)> {
    if n_draws == 0 {
        return Err(Error::domain("n_draws must be positive".to_string()));
    }
    let prior = IsPrior::new(alpha, 1.0)?;
    let mut kappas = Vec::with_capacity(n_draws);
    let mut logw = Vec::with_capacity(n_draws);
    let mut inv1p = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let ln_theta = rng.ln_inverse_stable(&prior);
        let l1p = ln_theta.exp().ln_1p();
        kappas.push((ln_theta - l1p).exp());
        inv1p.push((-l1p).exp());
        logw.push(log_weight(ln_theta, l1p));
    }
    let lse = logsumexp(&logw);
    if !lse.is_finite() {
        return Err(Error::numeric(
            "all importance weights underflowed to zero".to_string(),
        ));
    }
    let weights: Vec<f64> = logw.iter().map(|lw| (lw - lse).exp()).collect();
    let ess = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
    let normalizer = (lse - (n_draws as f64).ln()).exp();
    let mean_inv1p = weights.iter().zip(&inv1p).map(|(w, v)| w * v).sum();
    Ok((kappas, weights, mean_inv1p, ess, normalizer))
}

fn weighted_kappa_summary(kappas: &[f64], weights: &[f64]) -> KappaSummary {
    let mut idx: Vec<usize> = (0..kappas.len()).collect();
    idx.sort_by(|&i, &j| kappas[i].total_cmp(&kappas[j]));
    let mean = weights.iter().zip(kappas).map(|(w, k)| w * k).sum();
    let mut qs = [f64::NAN; 3];
    let targets = [0.025, 0.5, 0.975];
    let mut cum = 0.0;
    let mut t = 0;
    for &i in &idx {
        cum += weights[i];
        while t < 3 && cum >= targets[t] {
            qs[t] = kappas[i];
            t += 1;
        }
        if t == 3 {
            break;
        }
    }
    // Weight rounding can leave the top quantile unset; close it with the max.
    for (q, _) in qs.iter_mut().zip(targets).skip(t) {
        *q = kappas[idx[kappas.len() - 1]];
    }
    KappaSummary {
        mean,
        q025: qs[0],
        median: qs[1],
        q975: qs[2],
    }
}

/// Unequal Poisson rates with a shared Exp(theta) prior on each rate:
/// E(Lambda_i | data) = (x_i + 1) E[(1+theta)^{-1}] under the theta-posterior
/// proportional to kappa^n (1-kappa)^{sum x} IS_alpha(theta).
pub fn poisson_unequal_rates(
    counts: &[u64],
    alpha: f64,
    n_draws: usize,
    rng: &mut RngStream,
) -> Result<ShrinkageResult> {
    if counts.is_empty() {
        return Err(Error::data("empty count vector".to_string()));
    }
    let n = counts.len() as f64;
    let w: f64 = counts.iter().map(|&c| c as f64).sum();
    let (kappas, weights, mean_inv1p, ess, normalizer) =
        snis_kappa(alpha, n_draws, |lnt, l1p| n * (lnt - l1p) - w * l1p, rng)?;
    let posterior_means = counts
        .iter()
        .map(|&x| (x as f64 + 1.0) * mean_inv1p)
        .collect();
    Ok(ShrinkageResult {
        posterior_means,
        kappa_summary: weighted_kappa_summary(&kappas, &weights),
        normalizer,
        ess,
        weight_degeneracy: ess < 50.0,
    })
}

/// Global shrinkage for normal means: X_i | lambda_i ~ N(lambda_i, 1),
/// Lambda_i | theta ~ N(0, 1/theta), Theta ~ IS_alpha. The theta-posterior is
/// proportional to kappa^{n/2} exp((1-kappa) ||x||^2 / 2) IS_alpha(theta) and
/// E(Lambda_i | data) = x_i E[(1+theta)^{-1}].
pub fn shrinkage_global_is(
    x: &[f64],
    alpha: f64,
    n_draws: usize,
    rng: &mut RngStream,
) -> Result<ShrinkageResult> {
    if x.is_empty() {
        return Err(Error::data("empty data vector".to_string()));
    }
    let n = x.len() as f64;
    let s: f64 = x.iter().map(|v| v * v).sum();
    let (kappas, weights, mean_inv1p, ess, normalizer) = snis_kappa(
        alpha,
        n_draws,
        |lnt, l1p| {
            let kappa = (lnt - l1p).exp();
            0.5 * n * (lnt - l1p) + 0.5 * (1.0 - kappa) * s
        },
        rng,
    )?;
    let posterior_means = x.iter().map(|&xi| xi * mean_inv1p).collect();
    Ok(ShrinkageResult {
        posterior_means,
        kappa_summary: weighted_kappa_summary(&kappas, &weights),
        normalizer,
        ess,
        weight_degeneracy: ess < 50.0,
    })
}

/// Local shrinkage: one theta_i per coordinate, each with the b = 1/2
/// single-observation posterior kappa_i^{1/2} exp((1-kappa_i) x_i^2 / 2)
/// IS_alpha(theta_i). Kappa draws are pooled across coordinates for the
/// summary; the normalizer and ESS report the per-coordinate mean and min.
pub fn shrinkage_local_is(
    x: &[f64],
    alpha: f64,
    n_draws: usize,
    rng: &mut RngStream,
) -> Result<ShrinkageResult> {
    if x.is_empty() {
        return Err(Error::data("empty data vector".to_string()));
    }
    let mut posterior_means = Vec::with_capacity(x.len());
    let mut pooled_k = Vec::new();
    let mut pooled_w = Vec::new();
    let mut min_ess = f64::INFINITY;
    let mut norm_sum = 0.0;
    let coords = x.len() as f64;
    for &xi in x {
        let (kappas, weights, mean_inv1p, ess, normalizer) = snis_kappa(
            alpha,
            n_draws,
            |lnt, l1p| {
                let kappa = (lnt - l1p).exp();
                0.5 * (lnt - l1p) + 0.5 * (1.0 - kappa) * xi * xi
            },
            rng,
        )?;
        posterior_means.push(xi * mean_inv1p);
        min_ess = min_ess.min(ess);
        norm_sum += normalizer;
        pooled_k.extend_from_slice(&kappas);
        pooled_w.extend(weights.iter().map(|w| w / coords));
    }
    Ok(ShrinkageResult {
        posterior_means,
        kappa_summary: weighted_kappa_summary(&pooled_k, &pooled_w),
        normalizer: norm_sum / coords,
        ess: min_ess,
        weight_degeneracy: min_ess < 50.0,
    })
}

/// Inverted-beta baseline for global shrinkage: the delta^2-posterior is
/// proportional to (d2)^{-1/2} (1+d2)^{-(n+2)/2} exp(-||x||^2 / (2(1+d2)))
/// and E(Lambda_i | data) = x_i [1 - E(kappa')], kappa' = 1/(1+d2).
/// In kappa' the density is kappa'^{(n-1)/2} (1-kappa')^{-1/2} e^{-kappa' s/2};
/// substituting 1 - kappa' = v^2 removes the endpoint singularity, and the
/// moments come from quadrature. Draws for the kappa summary invert the
/// numeric CDF.
pub fn shrinkage_global_invbeta(
    x: &[f64],
    n_draws: usize,
    rng: &mut RngStream,
) -> Result<ShrinkageResult> {
    if x.is_empty() {
        return Err(Error::data("empty data vector".to_string()));
    }
    if n_draws == 0 {
        return Err(Error::domain("n_draws must be positive".to_string()));
    }
    let n = x.len() as f64;
    let s: f64 = x.iter().map(|v| v * v).sum();
    let coeff = 0.5 * (n - 1.0);
    let ln_density_v = move |v: f64| {
        let kappa = 1.0 - v * v;
        let power = if coeff == 0.0 { 0.0 } else { coeff * kappa.ln() };
        std::f64::consts::LN_2 + power - 0.5 * kappa * s
    };
    // Rescale by the peak so large n ||x||^2 cannot underflow the integrals.
    let mut peak = f64::NEG_INFINITY;
    for k in 0..=512 {
        peak = peak.max(ln_density_v(k as f64 / 512.0));
    }
    let density_v = move |v: f64| {
        let e = ln_density_v(v) - peak;
        if e > -745.0 {
            e.exp()
        } else {
            0.0
        }
    };
    let i0 = quad::integrate(density_v, 0.0, 1.0, 1e-10)?;
    let i1 = quad::integrate(|v| (1.0 - v * v) * density_v(v), 0.0, 1.0, 1e-10)?;
    if !(i0 > 0.0) {
        return Err(Error::numeric(
            "inverted-beta posterior normalizer vanished".to_string(),
        ));
    }
    let mean_kappa = i1 / i0;
    let posterior_means = x.iter().map(|&xi| xi * (1.0 - mean_kappa)).collect();

    // CDF grid in v for inverse-transform kappa draws.
    let m = 2000;
    let mut cdf = vec![0.0; m + 1];
    let mut prev = density_v(0.0);
    for (k, slot) in cdf.iter_mut().enumerate().skip(1) {
        let v = k as f64 / m as f64;
        let cur = density_v(v);
        *slot = (0.5 / m as f64) * (prev + cur);
        prev = cur;
    }
    for k in 1..=m {
        cdf[k] += cdf[k - 1];
    }
    let total = cdf[m];
    let mut kappas = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let u = rng.uniform_open01() * total;
        let j = cdf.partition_point(|&c| c < u).clamp(1, m);
        let frac = (u - cdf[j - 1]) / (cdf[j] - cdf[j - 1]).max(f64::MIN_POSITIVE);
        let v = (j as f64 - 1.0 + frac) / m as f64;
        kappas.push(1.0 - v * v);
    }
    let weights = vec![1.0 / n_draws as f64; n_draws];
    let mut summary = weighted_kappa_summary(&kappas, &weights);
    summary.mean = mean_kappa; // quadrature value beats the sampled mean
    Ok(ShrinkageResult {
        posterior_means,
        kappa_summary: summary,
        normalizer: (peak + i0.ln()).exp(),
        ess: n_draws as f64,
        weight_degeneracy: false,
    })
}

/// Density of the shrinkage factor kappa = theta/(1+theta) when theta follows
/// IS_{alpha,1}: p(kappa) = (1-kappa)^{-2} IS_alpha(kappa/(1-kappa)). Falls
/// back to the saddle-point tail (with its sqrt(alpha) prefactor correction)
/// where the quadrature density underflows.
pub fn kappa_prior_pdf(alpha: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::domain(format!(
            "kappa must lie in (0,1), got {kappa}"
        )));
    }
    let prior = IsPrior::new(alpha, 1.0)?;
    let theta = kappa / (1.0 - kappa);
    let ln_is = match ln_inverse_stable_pdf(&prior, theta) {
        Ok(v) => v,
        Err(Error::Numeric(_)) => ln_is_tail_approx(alpha, alpha * theta)? + 0.5 * alpha.ln(),
        Err(e) => return Err(e),
    };
    Ok((ln_is - 2.0 * (1.0 - kappa).ln()).exp())
}

/// Log marginal likelihood of w = sum of counts in the Poisson-exponential
/// model with hyperparameters (alpha, rho):
/// ln E_Theta[Theta n^w / (n + Theta)^{w+1}], estimated by Monte Carlo.
pub fn marginal_lik_hyper(
    counts: &[u64],
    alpha: f64,
    rho: f64,
    n_draws: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::data("empty count vector".to_string()));
    }
    if n_draws == 0 {
        return Err(Error::domain("n_draws must be positive".to_string()));
    }
    let prior = IsPrior::new(alpha, rho)?;
    let n = counts.len() as f64;
    let w: f64 = counts.iter().map(|&c| c as f64).sum();
    let mut terms = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let ln_theta = rng.ln_inverse_stable(&prior);
        let theta = ln_theta.exp();
        terms.push(ln_theta + w * n.ln() - (w + 1.0) * (n + theta).ln());
    }
    Ok(logsumexp(&terms) - (n_draws as f64).ln())
}

/// Grid search for the marginal-likelihood maximizer over (alpha, rho).
/// One batch of Chambers-Mellows-Stuck inputs is shared by every grid point
/// (common random numbers), so the surface is smooth in the hyperparameters
/// and the argmax is reproducible for a given stream.
pub fn hyper_grid_mle(
    counts: &[u64],
    alphas: &[f64],
    rhos: &[f64],
    n_draws: usize,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    if counts.is_empty() {
        return Err(Error::data("empty count vector".to_string()));
    }
    if alphas.is_empty() || rhos.is_empty() || n_draws == 0 {
        return Err(Error::domain(
            "need nonempty alpha/rho grids and positive n_draws".to_string(),
        ));
    }
    let n = counts.len() as f64;
    let w: f64 = counts.iter().map(|&c| c as f64).sum();
    let inputs: Vec<(f64, f64)> = (0..n_draws)
        .map(|_| (rng.uniform_open01(), rng.exponential(1.0)))
        .collect();
    let mut best = (f64::NEG_INFINITY, alphas[0], rhos[0]);
    let mut terms = vec![0.0; n_draws];
    for &alpha in alphas {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "grid alpha must lie in (0,1), got {alpha}"
            )));
        }
        let ln_s: Vec<f64> = inputs
            .iter()
            .map(|&(u, e)| RngStream::ln_alpha_stable_at(alpha, u, e))
            .collect();
        for &rho in rhos {
            if !(rho > 0.0) {
                return Err(Error::domain(format!(
                    "grid rho must be positive, got {rho}"
                )));
            }
            for (t, &ls) in terms.iter_mut().zip(&ln_s) {
                let ln_theta = rho.ln() - alpha * ls;
                *t = ln_theta + w * n.ln() - (w + 1.0) * (n + ln_theta.exp()).ln();
            }
            let ll = logsumexp(&terms) - (n_draws as f64).ln();
            if ll > best.0 {
                best = (ll, alpha, rho);
            }
        }
    }
    Ok((best.1, best.2))
}

/// Hyperparameter grid for [`gibbs_quine`]: marginally equally spaced points
/// over the open rectangle (0.01, 0.99) x (0.005, 3).
#[derive(Debug, Clone, Copy)]
pub struct HyperGridSpec {
    pub n_alpha: usize,
    pub n_rho: usize,
}

impl HyperGridSpec {
    pub const ALPHA_RANGE: (f64, f64) = (0.01, 0.99);
    pub const RHO_RANGE: (f64, f64) = (0.005, 3.0);
    pub const MIN_POINTS: usize = 30_000;

    pub fn new(n_alpha: usize, n_rho: usize) -> Result<Self> {
        if n_alpha < 2 || n_rho < 2 || n_alpha * n_rho < Self::MIN_POINTS {
            return Err(Error::domain(format!(
                "hyperparameter grid needs at least {} points ({n_alpha} x {n_rho} given)",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { n_alpha, n_rho })
    }

    fn alphas(&self) -> Vec<f64> {
        let (lo, hi) = Self::ALPHA_RANGE;
        let h = (hi - lo) / self.n_alpha as f64;
        (0..self.n_alpha)
            .map(|i| lo + (i as f64 + 0.5) * h)
            .collect()
    }

    fn rhos(&self) -> Vec<f64> {
        let (lo, hi) = Self::RHO_RANGE;
        let h = (hi - lo) / self.n_rho as f64;
        (0..self.n_rho).map(|j| lo + (j as f64 + 0.5) * h).collect()
    }
}

impl Default for HyperGridSpec {
    fn default() -> Self {
        Self {
            n_alpha: 200,
            n_rho: 150,
        }
    }
}

/// Per-alpha table of u -> ln IS_{alpha,1}(e^u). Knots concentrate near u = 0
/// where the density peaks sharply as alpha -> 1; outside the table the
/// density is flat (left, the finite origin limit) or follows the
/// saddle-point tail (right).
struct LnIsTable {
    alpha: f64,
    spline: Spline,
}

impl LnIsTable {
    fn build(alpha: f64) -> Result<Self> {
        IsPrior::new(alpha, 1.0)?; // validates alpha
        let mut xs: Vec<f64> = Vec::new();
        let mut u = -25.0;
        while u <= 25.0 + 1e-9 {
            xs.push(u);
            u += 0.5;
        }
        let step = if alpha > 0.8 {
            ((1.0 - alpha) / 4.0).max(0.004)
        } else {
            0.1
        };
        let mut u = -3.0;
        while u <= 3.0 + 1e-9 {
            xs.push(u);
            u += step;
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let ys: Vec<f64> = xs
            .iter()
            .map(|&u| {
                let v = crate::specfun::stable::ln_inverse_stable_pdf_raw(alpha, 1.0, u.exp(), 24);
                if v.is_finite() {
                    v.max(LN_FLOOR)
                } else {
                    LN_FLOOR
                }
            })
            .collect();
        Ok(Self {
            alpha,
            spline: Spline::new(xs, ys),
        })
    }

    fn ln_is1(&self, u: f64) -> f64 {
        let xs = &self.spline.xs;
        if u <= xs[0] {
            self.spline.ys[0]
        } else if u >= xs[xs.len() - 1] {
            let v = ln_is_tail_approx(self.alpha, self.alpha * u.exp())
                .map_or(LN_FLOOR, |t| t + 0.5 * self.alpha.ln());
            if v.is_finite() {
                v.max(LN_FLOOR)
            } else {
                LN_FLOOR
            }
        } else {
            self.spline.eval(u)
        }
    }
}

/// Three-block Gibbs sampler for the count model with random hyperparameters:
/// X_j | lambda ~ Poisson(lambda), Lambda | theta ~ Exp(theta),
/// Theta | (alpha, rho) ~ IS_{alpha,rho}, and the hyperprior puts a flat
/// density on alpha and the positive sqrt(alpha)-stable density on rho.
/// The (alpha, rho)-conditional is sampled from grid weights proportional to
/// IS_{alpha,rho}(theta) g_{sqrt(alpha)}(rho), with the max log-weight
/// subtracted before exponentiation.
pub fn gibbs_quine(
    counts: &[u64],
    grid: &HyperGridSpec,
    iters: usize,
    burn_in: usize,
    rng: &mut RngStream,
) -> Result<(GibbsChain, HyperPosterior)> {
    check_chain_lengths(iters, burn_in)?;
    if counts.is_empty() {
        return Err(Error::data("empty count vector".to_string()));
    }
    let n = counts.len() as f64;
    let w: f64 = counts.iter().map(|&c| c as f64).sum();
    let alphas = grid.alphas();
    let rhos = grid.rhos();
    let ln_rhos: Vec<f64> = rhos.iter().map(|r| r.ln()).collect();
    let tables: Vec<LnIsTable> = alphas
        .iter()
        .map(|&a| LnIsTable::build(a))
        .collect::<Result<_>>()?;
    // Hyperprior factor ln g_{sqrt(alpha)}(rho) on the fixed grid.
    let ln_hyper: Vec<f64> = alphas
        .iter()
        .flat_map(|&a| {
            let rhos = &rhos;
            rhos.iter().map(move |&r| (a.sqrt(), r))
        })
        .map(|(idx, r)| match ln_stable_pdf(idx, r) {
            Ok(v) if v.is_finite() => v.max(LN_FLOOR),
            _ => LN_FLOOR,
        })
        .collect();

    let n_pts = alphas.len() * rhos.len();
    let mut lw = vec![0.0; n_pts];
    let mut weight_acc = vec![0.0; n_pts];
    let kept = iters - burn_in;

    let draw_eta = |theta: f64,
                        acc: Option<&mut Vec<f64>>,
                        lw: &mut Vec<f64>,
                        rng: &mut RngStream|
     -> Result<(f64, f64)> {
        let ln_theta = theta.ln();
        let mut max_lw = f64::NEG_INFINITY;
        for (i, table) in tables.iter().enumerate() {
            for (j, &ln_rho) in ln_rhos.iter().enumerate() {
                let v = table.ln_is1(ln_theta - ln_rho) - ln_rho + ln_hyper[i * rhos.len() + j];
                lw[i * rhos.len() + j] = v;
                max_lw = max_lw.max(v);
            }
        }
        if max_lw <= LN_FLOOR {
            return Err(Error::numeric(
                "every hyperparameter grid weight underflowed even after max log-weight \
                 subtraction"
                    .to_string(),
            ));
        }
        let mut total = 0.0;
        for v in lw.iter_mut() {
            *v = (*v - max_lw).exp();
            total += *v;
        }
        if let Some(acc) = acc {
            for (a, &v) in acc.iter_mut().zip(lw.iter()) {
                *a += v / (total * kept as f64);
            }
        }
        let target = rng.uniform_open01() * total;
        let mut cum = 0.0;
        let mut pick = n_pts - 1;
        for (k, &v) in lw.iter().enumerate() {
            cum += v;
            if cum >= target {
                pick = k;
                break;
            }
        }
        Ok((alphas[pick / rhos.len()], rhos[pick % rhos.len()]))
    };

    let mut theta = n / (w + 1.0);
    let (mut alpha_c, mut rho_c) = draw_eta(theta, None, &mut lw, rng)?;
    let mut lambda_draws = Vec::with_capacity(iters);
    let mut theta_draws = Vec::with_capacity(iters);
    let mut hyper_draws = Vec::with_capacity(iters);
    for it in 0..iters {
        let lambda = rng.gamma(w + 1.0, n + theta);
        let prior = IsPrior::new(alpha_c, rho_c)?;
        let spec = PosteriorSpec::new(SuffStats::new(lambda, 1.0, counts.len() as u64)?, prior);
        theta = posterior_sample_ar(&spec, 1, GIBBS_AR_BUDGET, rng)?.draws[0];
        let acc = (it >= burn_in).then_some(&mut weight_acc);
        (alpha_c, rho_c) = draw_eta(theta, acc, &mut lw, rng)?;
        lambda_draws.push(lambda);
        theta_draws.push(theta);
        hyper_draws.push((alpha_c, rho_c));
    }

    let grid_pts: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| rhos.iter().map(move |&r| (a, r)))
        .collect();
    let hyper_post = HyperPosterior {
        grid: grid_pts,
        weights: weight_acc,
        draws: hyper_draws[burn_in..].to_vec(),
    };
    Ok((
        GibbsChain {
            lambda_draws,
            theta_draws,
            hyper_draws,
            burn_in,
        },
        hyper_post,
    ))
}
