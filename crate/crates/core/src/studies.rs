//! Simulation-study harness: frequentist risk tables for the posterior-mean
//! estimators, robust spread summaries, and highest-posterior-density
//! intervals.
//!
//! [`run_table2`] replays the single-parameter shrinkage study: for each
//! (family, true theta, prior) row and each sample size it simulates data,
//! computes the importance-weighted posterior mean, the accept-reject
//! posterior mean, and the closed-form MLE, and reports the replication mean
//! and median absolute deviation of each. [`run_table3`] replays the
//! normal-means compound estimation study (cases I-V) comparing the
//! inverted-beta prior against the inverse stable prior at several alpha.

use crate::error::{Error, Result};
use crate::expfam::{self, Family, ModelSpec};
use crate::hierarchical::{shrinkage_global_invbeta, shrinkage_global_is};
use crate::posterior::{self, PosteriorSpec, DEFAULT_MAX_PROPOSALS};
use crate::rng::{IsPrior, RngStream};

/// One row of the single-parameter risk study: a family, the data-generating
/// theta, and the prior used for both posterior-mean estimators.
#[derive(Debug, Clone)]
pub struct Table2Row {
    pub model: ModelSpec,
    pub true_theta: f64,
    pub prior: IsPrior,
}

/// Configuration for [`run_table2`].
#[derive(Debug, Clone)]
pub struct Table2Config {
    pub rows: Vec<Table2Row>,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub posterior_draws: u64,
}

impl Table2Config {
    /// The five rows of the published study.
    pub fn paper_rows() -> Result<Vec<Table2Row>> {
        let row = |family, nuisance, theta, alpha, rho| -> Result<Table2Row> {
            Ok(Table2Row {
                model: ModelSpec::new(family, nuisance)?,
                true_theta: theta,
                prior: IsPrior::new(alpha, rho)?,
            })
        };
        let half_normal_rho = (2.0 / std::f64::consts::PI).sqrt();
        Ok(vec![
            row(Family::Poisson, None, 4.0, 0.4, 4.0)?,
            row(Family::Rayleigh, None, std::f64::consts::FRAC_PI_2, 0.5, 1.0)?,
            row(
                Family::HalfNormal,
                None,
                std::f64::consts::FRAC_PI_2,
                0.6,
                half_normal_rho,
            )?,
            row(Family::GeneralizedExponential, Some(1.0), 2.0, 0.8, 1.5)?,
            row(Family::Exponential, None, 1.0, 0.95, 1.0)?,
        ])
    }
}

impl Default for Table2Config {
    fn default() -> Self {
        Table2Config {
            rows: Self::paper_rows().expect("built-in rows are valid"),
            sample_sizes: vec![15, 30, 60],
            replications: 1000,
            posterior_draws: 500,
        }
    }
}

/// Replication mean and MAD of the three estimators for one (row, n) cell.
#[derive(Debug, Clone)]
pub struct Table2Cell {
    pub family: Family,
    pub true_theta: f64,
    pub n: usize,
    /// Importance-weighted posterior mean (ratio estimator).
    pub mean_mc: f64,
    pub mad_mc: f64,
    /// Accept-reject posterior mean.
    pub mean_ar: f64,
    pub mad_ar: f64,
    pub mean_mle: f64,
    pub mad_mle: f64,
    /// Replications dropped because the accept-reject budget ran out.
    pub failed_reps: usize,
}

/// Run the single-parameter risk study. Replications that exhaust the
/// accept-reject proposal budget are dropped and counted per cell.
pub fn run_table2(config: &Table2Config, rng: &mut RngStream) -> Result<Vec<Table2Cell>> {
    if config.rows.is_empty() || config.sample_sizes.is_empty() {
        return Err(Error::domain(
            "table 2 config needs at least one row and one sample size".to_string(),
        ));
    }
    if config.replications == 0 || config.posterior_draws == 0 {
        return Err(Error::domain(
            "replications and posterior_draws must be positive".to_string(),
        ));
    }
    let mut cells = Vec::new();
    for row in &config.rows {
        for &n in &config.sample_sizes {
            let mut est_mc = Vec::with_capacity(config.replications);
            let mut est_ar = Vec::with_capacity(config.replications);
            let mut est_mle = Vec::with_capacity(config.replications);
            let mut failed = 0usize;
            for _ in 0..config.replications {
                let data = expfam::sample_data(&row.model, row.true_theta, n, rng)?;
                let stats = expfam::sufficient_stats(&row.model, &data)?;
                let spec = PosteriorSpec::new(stats, row.prior.clone());
                let t1 = posterior::bayes_estimate_mc(&spec, 1.0, config.posterior_draws, rng)?.0;
                let t2 = match posterior::posterior_sample_ar(
                    &spec,
                    config.posterior_draws,
                    DEFAULT_MAX_PROPOSALS,
                    rng,
                ) {
                    Ok(out) => {
                        out.draws.iter().sum::<f64>() / out.draws.len() as f64
                    }
                    Err(Error::BudgetExhausted { .. }) => {
                        failed += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                est_mc.push(t1);
                est_ar.push(t2);
                est_mle.push(expfam::mle_closed_form(&row.model, &data)?);
            }
            if est_mc.is_empty() {
                return Err(Error::numeric(format!(
                    "every replication exhausted the accept-reject budget for {:?}, n = {n}",
                    row.model.family()
                )));
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            cells.push(Table2Cell {
                family: row.model.family(),
                true_theta: row.true_theta,
                n,
                mean_mc: mean(&est_mc),
                mad_mc: mad(&est_mc)?,
                mean_ar: mean(&est_ar),
                mad_ar: mad(&est_ar)?,
                mean_mle: mean(&est_mle),
                mad_mle: mad(&est_mle)?,
                failed_reps: failed,
            });
        }
    }
    Ok(cells)
}

/// Scenarios of the normal-means compound estimation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShrinkCase {
    /// 9 means, Lambda_i ~ N(0, 1), X_i ~ N(lambda_i, 1).
    I,
    /// 3 distinct means each repeated over 3 observations, Lambda ~ N(0, 1).
    II,
    /// As II but Lambda ~ N(0, 100).
    III,
    /// 250 means, Lambda_i ~ 0.9 delta_0 + 0.1 (3 t_2), X_i ~ N(lambda_i, 1).
    IV,
    /// As IV but X_i ~ N(lambda_i, 1.5).
    V,
}

/// Estimation method compared in the study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShrinkMethod {
    InvertedBeta,
    InverseStable { alpha: f64 },
}

/// Accumulated L1 and squared-L2 risk for one (case, method) pair.
#[derive(Debug, Clone)]
pub struct RiskRow {
    pub case: ShrinkCase,
    pub method: ShrinkMethod,
    pub l1: f64,
    pub l2_sq: f64,
    /// Replications where the posterior computation failed (dropped).
    pub failed_reps: usize,
}

/// Output of [`run_table3`].
#[derive(Debug, Clone)]
pub struct RiskReport {
    pub replications: usize,
    pub rows: Vec<RiskRow>,
}

fn draw_case(case: ShrinkCase, rng: &mut RngStream) -> (Vec<f64>, Vec<f64>) {
    let t2 = |rng: &mut RngStream| {
        rng.standard_normal() / rng.exponential(1.0).sqrt()
    };
    let (lambdas, noise_sd): (Vec<f64>, f64) = match case {
        ShrinkCase::I => ((0..9).map(|_| rng.standard_normal()).collect(), 1.0),
        ShrinkCase::II | ShrinkCase::III => {
            let sd = if case == ShrinkCase::II { 1.0 } else { 10.0 };
            let distinct: Vec<f64> = (0..3).map(|_| sd * rng.standard_normal()).collect();
            (
                (0..9).map(|i| distinct[i / 3]).collect(),
                1.0,
            )
        }
        ShrinkCase::IV | ShrinkCase::V => {
            let sd = if case == ShrinkCase::IV { 1.0 } else { 1.5f64.sqrt() };
            (
                (0..250)
                    .map(|_| {
                        if rng.uniform_open01() < 0.1 {
                            3.0 * t2(rng)
                        } else {
                            0.0
                        }
                    })
                    .collect(),
                sd,
            )
        }
    };
    let x = lambdas
        .iter()
        .map(|&l| l + noise_sd * rng.standard_normal())
        .collect();
    (lambdas, x)
}

/// Run the compound estimation study: per case, average the L1 and squared-L2
/// losses of the posterior-mean vector under the inverted-beta prior and the
/// inverse stable prior at each requested alpha.
pub fn run_table3(
    cases: &[ShrinkCase],
    alphas: &[f64],
    replications: usize,
    snis_draws: usize,
    rng: &mut RngStream,
) -> Result<RiskReport> {
    if cases.is_empty() || replications == 0 || snis_draws == 0 {
        return Err(Error::domain(
            "table 3 needs at least one case and positive replications/draws".to_string(),
        ));
    }
    let mut methods = vec![ShrinkMethod::InvertedBeta];
    methods.extend(alphas.iter().map(|&a| ShrinkMethod::InverseStable { alpha: a }));
    let mut rows = Vec::new();
    for &case in cases {
        let mut acc: Vec<(f64, f64, usize)> = vec![(0.0, 0.0, 0); methods.len()];
        for _ in 0..replications {
            let (lambdas, x) = draw_case(case, rng);
            for (m, slot) in methods.iter().zip(acc.iter_mut()) {
                let result = match *m {
                    ShrinkMethod::InvertedBeta => shrinkage_global_invbeta(&x, 2, rng),
                    ShrinkMethod::InverseStable { alpha } => {
                        shrinkage_global_is(&x, alpha, snis_draws, rng)
                    }
                };
                match result {
                    Ok(res) => {
                        for (est, truth) in res.posterior_means.iter().zip(&lambdas) {
                            let d = (est - truth).abs();
                            slot.0 += d;
                            slot.1 += d * d;
                        }
                    }
                    Err(_) => slot.2 += 1,
                }
            }
        }
        for (m, (l1, l2, failed)) in methods.iter().zip(acc) {
            let kept = (replications - failed) as f64;
            if kept == 0.0 {
                return Err(Error::numeric(format!(
                    "every replication failed for case {case:?} under {m:?}"
                )));
            }
            rows.push(RiskRow {
                case,
                method: *m,
                l1: l1 / kept,
                l2_sq: l2 / kept,
                failed_reps: failed,
            });
        }
    }
    Ok(RiskReport {
        replications,
        rows,
    })
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Median absolute deviation about the median, unscaled.
pub fn mad(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("mad of an empty slice".to_string()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let med = median_of_sorted(&sorted);
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - med).abs()).collect();
    dev.sort_by(|a, b| a.total_cmp(b));
    Ok(median_of_sorted(&dev))
}

/// Highest-posterior-density interval from posterior draws: the shortest
/// window containing `ceil(level * n)` of the sorted samples. Requires at
/// least 100 samples, which keeps the window estimate meaningful.
pub fn hpd_interval(samples: &[f64], level: f64) -> Result<(f64, f64)> {
    if samples.len() < 100 {
        return Err(Error::domain(format!(
            "hpd_interval needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "level must lie in (0, 1), got {level}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let m = ((level * n as f64).ceil() as usize).clamp(1, n);
    let mut best = (sorted[0], sorted[m - 1]);
    for i in 1..=(n - m) {
        if sorted[i + m - 1] - sorted[i] < best.1 - best.0 {
            best = (sorted[i], sorted[i + m - 1]);
        }
    }
    Ok(best)
}
