//! `invstable` command line: CSV in, JSON/CSV out, deterministic for a given
//! seed. Exit codes: 2 usage, 3 data, 4 numeric.

mod output;

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use invstable::expfam::{self, Family, ModelSpec};
use invstable::hierarchical::{gibbs_quine, kappa_prior_pdf, HyperGridSpec};
use invstable::posterior::{
    bayes_estimate_mc, heavy_tail_adjust, posterior_sample_ar, HeavyTailSpec, PosteriorSpec,
    DEFAULT_MAX_PROPOSALS,
};
use invstable::predictive::{prior_predictive_moment, prior_predictive_pdf, PredictiveSpec};
use invstable::specfun::gml::{gml_posterior_norm, gml_series, gml_series_in_regime, GmlArgs};
use invstable::specfun::inverse_stable_pdf;
use invstable::studies::{
    hpd_interval, run_table2, run_table3, ShrinkCase, ShrinkMethod, Table2Config, Table2Row,
};
use invstable::{Error, IsPrior, RngStream};

use output::{fmt_sig, round_sig, Sink};

#[derive(Parser)]
#[command(name = "invstable", version, about = "Bayesian inference with the inverse stable prior")]
struct Cli {
    /// RNG seed (env INVSTABLE_SEED is the default).
    #[arg(long, global = true, env = "INVSTABLE_SEED", default_value_t = 0)]
    seed: u64,
    /// Significant digits in numeric output.
    #[arg(long, global = true, default_value_t = 6)]
    digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Posterior point estimate, variance, HPD interval, and acceptance rate.
    Fit(FitArgs),
    /// Evaluate the generalized Mittag-Leffler function.
    MlEval(MlEvalArgs),
    /// Prior predictive density on a grid, with optional fractional moments.
    Predictive(PredictiveArgs),
    /// Hierarchical Poisson-exponential Gibbs analysis of a count column.
    Quine(QuineArgs),
    /// Replicated single-parameter risk table.
    SimulateTable2(Table2Args),
    /// Replicated normal-means compound risk table.
    ShrinkBench(Table3Args),
    /// Emit density curves for external plotting.
    PlotData(PlotArgs),
}

#[derive(Args)]
struct ModelFlags {
    /// Observation family (poisson, rayleigh, half-normal, inverse-rayleigh,
    /// exponential, laplace, inverse-exponential, skew-logistic, gamma,
    /// weibull, normal, generalized-exponential).
    #[arg(long)]
    model: String,
    /// Fixed nuisance parameter (gamma/weibull shape, normal mean,
    /// generalized-exponential rate).
    #[arg(long)]
    nuisance: Option<f64>,
}

impl ModelFlags {
    fn build(&self) -> Result<ModelSpec, Error> {
        let family = match self.model.to_lowercase().as_str() {
            "poisson" => Family::Poisson,
            "rayleigh" => Family::Rayleigh,
            "half-normal" | "halfnormal" => Family::HalfNormal,
            "inverse-rayleigh" => Family::InverseRayleigh,
            "exponential" => Family::Exponential,
            "laplace" => Family::Laplace,
            "inverse-exponential" => Family::InverseExponential,
            "skew-logistic" => Family::SkewLogistic,
            "gamma" => Family::GammaKnownShape,
            "weibull" => Family::WeibullKnownShape,
            "normal" => Family::NormalKnownMean,
            "generalized-exponential" => Family::GeneralizedExponential,
            other => {
                return Err(Error::domain(format!("unknown model family `{other}`")));
            }
        };
        ModelSpec::new(family, self.nuisance)
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// CSV file with one numeric column (optional header).
    #[arg(long)]
    data: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    rho: f64,
    /// Heavy-tail adjustment exponent alpha' (reduces b to b - (alpha+alpha')/alpha).
    #[arg(long = "heavy-tail")]
    heavy_tail: Option<f64>,
    /// Posterior draws per estimator.
    #[arg(long, default_value_t = 10_000)]
    draws: u64,
    /// HPD coverage level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Args)]
struct MlEvalArgs {
    /// Series parameters eta,nu,tau,w (comma separated).
    #[arg(long, conflicts_with = "posterior")]
    series: Option<String>,
    /// Posterior-normalizer form alpha,rho,omega,a (comma separated).
    #[arg(long)]
    posterior: Option<String>,
}

#[derive(Args)]
struct PredictiveArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    rho: f64,
    /// Grid lo:hi:steps for the transformed observation a*.
    #[arg(long)]
    grid: String,
    /// Fractional moment orders to report (comma separated, each < 1).
    #[arg(long)]
    moments: Option<String>,
    /// Output CSV path (stdout when omitted; moments then go to stderr).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct QuineArgs {
    /// CSV file with one count column (optional header).
    #[arg(long)]
    data: String,
    /// Hyperparameter grid a_lo:a_hi:a_n x r_lo:r_hi:r_n; the ranges must be
    /// 0.01:0.99 and 0.005:3.
    #[arg(long, default_value = "0.01:0.99:200x0.005:3:150")]
    grid: String,
    #[arg(long, default_value_t = 13_000)]
    iters: usize,
    #[arg(long, default_value_t = 3_000)]
    burnin: usize,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Chain CSV path (lambda, theta, alpha, rho per kept iteration).
    #[arg(long = "chain-out")]
    chain_out: Option<String>,
    /// Summary JSON path (stdout when omitted).
    #[arg(long = "summary-out")]
    summary_out: Option<String>,
}

#[derive(Args)]
struct Table2Args {
    /// `all` or a comma list of family names from the study rows.
    #[arg(long, default_value = "all")]
    rows: String,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Comma list of sample sizes.
    #[arg(long, default_value = "15,30,60")]
    n: String,
    #[arg(long, default_value_t = 500)]
    draws: u64,
    /// Multiplier applied to every reported MAD (1.4826 for the normal-consistent scale).
    #[arg(long = "mad-scale", default_value_t = 1.0)]
    mad_scale: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct Table3Args {
    /// Comma list of scenario labels among I,II,III,IV,V.
    #[arg(long, default_value = "I,II,III,IV,V")]
    cases: String,
    /// Comma list of prior alphas to compare against the inverted beta.
    #[arg(long, default_value = "0.01,0.5,0.99")]
    alphas: String,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Importance-sampling draws per replication.
    #[arg(long, default_value_t = 4000)]
    draws: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct PlotArgs {
    /// `prior` (theta densities) or `kappa` (shrinkage-factor densities).
    which: String,
    /// Comma list of alphas.
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Grid lo:hi:steps (prior only; kappa always uses (0,1)).
    #[arg(long, default_value = "0:5:500")]
    grid: String,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (class, code) = match e {
                Error::Domain(_) => ("domain", 2),
                Error::Data(_) => ("data", 3),
                Error::Numeric(_) | Error::BudgetExhausted { .. } => ("numeric", 4),
            };
            eprintln!("{{\"error\":\"{class}\",\"message\":{}}}", serde_json::json!(e.to_string()));
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let mut rng = RngStream::new(cli.seed, 0);
    let d = cli.digits;
    match &cli.command {
        Command::Fit(a) => fit(a, d, &mut rng),
        Command::MlEval(a) => ml_eval(a, d),
        Command::Predictive(a) => predictive(a, d),
        Command::Quine(a) => quine(a, d, &mut rng),
        Command::SimulateTable2(a) => table2(a, d, &mut rng),
        Command::ShrinkBench(a) => table3(a, d, &mut rng),
        Command::PlotData(a) => plot_data(a, d),
    }
}

fn read_column(path: &str) -> Result<Vec<f64>, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::data(format!("cannot read {path}: {e}")))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match trimmed.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {} // header row
            Err(_) => {
                return Err(Error::data(format!(
                    "{path}:{}: not a number: `{trimmed}`",
                    i + 1
                )));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::data(format!("{path}: no numeric rows")));
    }
    Ok(out)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("bad {what} entry `{p}`")))
        })
        .collect()
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let fail = || Error::domain(format!("grid must be lo:hi:steps, got `{s}`"));
    if parts.len() != 3 {
        return Err(fail());
    }
    let lo: f64 = parts[0].parse().map_err(|_| fail())?;
    let hi: f64 = parts[1].parse().map_err(|_| fail())?;
    let steps: usize = parts[2].parse().map_err(|_| fail())?;
    if !(hi > lo) || steps < 2 {
        return Err(fail());
    }
    Ok((lo, hi, steps))
}

fn fit(a: &FitArgs, digits: usize, rng: &mut RngStream) -> Result<(), Error> {
    let model = a.model.build()?;
    let data = read_column(&a.data)?;
    let mut stats = expfam::sufficient_stats(&model, &data)?;
    let prior = IsPrior::new(a.alpha, a.rho)?;
    if let Some(ap) = a.heavy_tail {
        stats = heavy_tail_adjust(&stats, &HeavyTailSpec::new(a.alpha, ap)?)?;
    }
    let spec = PosteriorSpec::new(stats, prior);
    let (estimate, variance) = bayes_estimate_mc(&spec, 1.0, a.draws, rng)?;
    let ar = posterior_sample_ar(&spec, a.draws, DEFAULT_MAX_PROPOSALS, rng)?;
    let (lo, hi) = hpd_interval(&ar.draws, a.level)?;
    let json = serde_json::json!({
        "point_estimate": round_sig(estimate, digits),
        "posterior_variance": round_sig(variance, digits),
        "hpd_level": a.level,
        "hpd_lower": round_sig(lo, digits),
        "hpd_upper": round_sig(hi, digits),
        "acceptance_rate": round_sig(ar.acceptance_rate, digits),
        "n_draws": a.draws,
    });
    println!("{json}");
    Ok(())
}

fn parse_quad(s: &str, what: &str) -> Result<[f64; 4], Error> {
    let v = parse_list(s, what)?;
    if v.len() != 4 {
        return Err(Error::domain(format!(
            "{what} needs exactly 4 comma-separated values"
        )));
    }
    Ok([v[0], v[1], v[2], v[3]])
}

fn ml_eval(a: &MlEvalArgs, digits: usize) -> Result<(), Error> {
    let est = match (&a.series, &a.posterior) {
        (Some(s), None) => {
            let [eta, nu, tau, w] = parse_quad(s, "--series")?;
            let args = GmlArgs::new(eta, nu, tau, w)?;
            if !gml_series_in_regime(&args) {
                return Err(Error::numeric(
                    "arguments outside the series regime; use --posterior for the \
                     posterior-normalizer form"
                        .to_string(),
                ));
            }
            gml_series(&args)?
        }
        (None, Some(p)) => {
            let [alpha, rho, omega, z] = parse_quad(p, "--posterior")?;
            gml_posterior_norm(&IsPrior::new(alpha, rho)?, omega, z)?
        }
        _ => {
            return Err(Error::domain(
                "exactly one of --series or --posterior is required".to_string(),
            ));
        }
    };
    let json = serde_json::json!({
        "value": round_sig(est.value, digits),
        "std_error": round_sig(est.std_error, digits),
        "method": format!("{:?}", est.method),
        "n_draws": est.n_draws,
    });
    println!("{json}");
    Ok(())
}

fn predictive(a: &PredictiveArgs, digits: usize) -> Result<(), Error> {
    let model = a.model.build()?;
    let prior = IsPrior::new(a.alpha, a.rho)?;
    let spec = PredictiveSpec::new(model, prior, None)?;
    let (lo, hi, steps) = parse_grid(&a.grid)?;
    let mut sink = Sink::open(a.out.as_deref())?;
    sink.line("a_star,density")?;
    for i in 0..steps {
        let x = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        if x <= 0.0 {
            continue;
        }
        let p = prior_predictive_pdf(&spec, x)?;
        sink.line(&format!("{},{}", fmt_sig(x, digits), fmt_sig(p, digits)))?;
    }
    if let Some(ms) = &a.moments {
        let orders = parse_list(ms, "--moments")?;
        let mut vals = serde_json::Map::new();
        for k in orders {
            vals.insert(
                format!("{k}"),
                round_sig(prior_predictive_moment(&spec, k)?, digits).into(),
            );
        }
        let json = serde_json::json!({ "moments": vals });
        if a.out.is_some() {
            println!("{json}");
        } else {
            eprintln!("{json}");
        }
    }
    Ok(())
}

fn parse_quine_grid(s: &str) -> Result<HyperGridSpec, Error> {
    let fail = || {
        Error::domain(format!(
            "grid must be 0.01:0.99:<n_alpha>x0.005:3:<n_rho>, got `{s}`"
        ))
    };
    let (a, r) = s.split_once('x').ok_or_else(fail)?;
    let (alo, ahi, an) = parse_grid(a)?;
    let (rlo, rhi, rn) = parse_grid(r)?;
    if (alo, ahi) != HyperGridSpec::ALPHA_RANGE || (rlo, rhi) != HyperGridSpec::RHO_RANGE {
        return Err(fail());
    }
    HyperGridSpec::new(an, rn)
}

fn quine(a: &QuineArgs, digits: usize, rng: &mut RngStream) -> Result<(), Error> {
    let raw = read_column(&a.data)?;
    let counts: Vec<u64> = raw
        .iter()
        .map(|&v| {
            if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                Ok(v as u64)
            } else {
                Err(Error::data(format!("count column has non-count value {v}")))
            }
        })
        .collect::<Result<_, _>>()?;
    let grid = parse_quine_grid(&a.grid)?;
    let (chain, hyper) = gibbs_quine(&counts, &grid, a.iters, a.burnin, rng)?;
    if let Some(path) = &a.chain_out {
        let mut sink = Sink::open(Some(path))?;
        sink.line("lambda,theta,alpha,rho")?;
        for ((l, t), (al, rh)) in chain
            .kept_lambda()
            .iter()
            .zip(chain.kept_theta())
            .zip(chain.kept_hyper())
        {
            sink.line(&format!(
                "{},{},{},{}",
                fmt_sig(*l, digits),
                fmt_sig(*t, digits),
                fmt_sig(*al, digits),
                fmt_sig(*rh, digits)
            ))?;
        }
    }
    let summarize = |draws: &[f64]| -> Result<serde_json::Value, Error> {
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let (lo, hi) = hpd_interval(draws, a.level)?;
        Ok(serde_json::json!({
            "mean": round_sig(mean, digits),
            "hpd_lower": round_sig(lo, digits),
            "hpd_upper": round_sig(hi, digits),
        }))
    };
    let alphas: Vec<f64> = chain.kept_hyper().iter().map(|h| h.0).collect();
    let rhos: Vec<f64> = chain.kept_hyper().iter().map(|h| h.1).collect();
    let json = serde_json::json!({
        "lambda": summarize(chain.kept_lambda())?,
        "theta": summarize(chain.kept_theta())?,
        "alpha": summarize(&alphas)?,
        "rho": summarize(&rhos)?,
        "hpd_level": a.level,
        "kept_iterations": chain.kept_lambda().len(),
        "grid_points": hyper.grid.len(),
    });
    match &a.summary_out {
        Some(path) => {
            let mut sink = Sink::open(Some(path))?;
            sink.line(&json.to_string())?;
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn table2(a: &Table2Args, digits: usize, rng: &mut RngStream) -> Result<(), Error> {
    let all = Table2Config::paper_rows()?;
    let rows: Vec<Table2Row> = if a.rows.trim().eq_ignore_ascii_case("all") {
        all
    } else {
        let mut picked = Vec::new();
        for name in a.rows.split(',') {
            let want = name.trim().to_lowercase().replace('-', "");
            let hit = all.iter().find(|r| {
                format!("{:?}", r.model.family()).to_lowercase().contains(&want)
            });
            match hit {
                Some(r) => picked.push(r.clone()),
                None => return Err(Error::domain(format!("unknown row `{name}`"))),
            }
        }
        picked
    };
    let sizes: Vec<usize> = parse_list(&a.n, "--n")?
        .into_iter()
        .map(|v| v as usize)
        .collect();
    if !(a.mad_scale > 0.0) || !a.mad_scale.is_finite() {
        return Err(Error::domain(format!("bad --mad-scale {}", a.mad_scale)));
    }
    let config = Table2Config {
        rows,
        sample_sizes: sizes,
        replications: a.reps,
        posterior_draws: a.draws,
    };
    let cells = run_table2(&config, rng)?;
    let mut sink = Sink::open(a.out.as_deref())?;
    sink.line("family,true_theta,n,mean_alg1,mad_alg1,mean_alg2,mad_alg2,mean_mle,mad_mle,failed_reps")?;
    for c in &cells {
        sink.line(&format!(
            "{:?},{},{},{},{},{},{},{},{},{}",
            c.family,
            fmt_sig(c.true_theta, digits),
            c.n,
            fmt_sig(c.mean_mc, digits),
            fmt_sig(c.mad_mc * a.mad_scale, digits),
            fmt_sig(c.mean_ar, digits),
            fmt_sig(c.mad_ar * a.mad_scale, digits),
            fmt_sig(c.mean_mle, digits),
            fmt_sig(c.mad_mle * a.mad_scale, digits),
            c.failed_reps
        ))?;
    }
    Ok(())
}

fn table3(a: &Table3Args, digits: usize, rng: &mut RngStream) -> Result<(), Error> {
    let cases: Vec<ShrinkCase> = a
        .cases
        .split(',')
        .map(|c| match c.trim().to_uppercase().as_str() {
            "I" => Ok(ShrinkCase::I),
            "II" => Ok(ShrinkCase::II),
            "III" => Ok(ShrinkCase::III),
            "IV" => Ok(ShrinkCase::IV),
            "V" => Ok(ShrinkCase::V),
            other => Err(Error::domain(format!("unknown case `{other}`"))),
        })
        .collect::<Result<_, _>>()?;
    let alphas = parse_list(&a.alphas, "--alphas")?;
    let report = run_table3(&cases, &alphas, a.reps, a.draws, rng)?;
    let mut sink = Sink::open(a.out.as_deref())?;
    sink.line("case,method,l1_risk,l2_squared_risk,failed_reps")?;
    for r in &report.rows {
        let method = match r.method {
            ShrinkMethod::InvertedBeta => "inverted_beta".to_string(),
            ShrinkMethod::InverseStable { alpha } => format!("inverse_stable_{alpha}"),
        };
        sink.line(&format!(
            "{:?},{},{},{},{}",
            r.case,
            method,
            fmt_sig(r.l1, digits),
            fmt_sig(r.l2_sq, digits),
            r.failed_reps
        ))?;
    }
    Ok(())
}

fn plot_data(a: &PlotArgs, digits: usize) -> Result<(), Error> {
    let alphas = parse_list(&a.alpha, "--alpha")?;
    let mut sink = Sink::open(a.out.as_deref())?;
    match a.which.to_lowercase().as_str() {
        "prior" => {
            let (lo, hi, steps) = parse_grid(&a.grid)?;
            sink.line("alpha,theta,density")?;
            for &alpha in &alphas {
                let prior = IsPrior::new(alpha, a.rho)?;
                for i in 0..steps {
                    let theta = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
                    if theta <= 0.0 {
                        continue;
                    }
                    let dens = inverse_stable_pdf(&prior, theta)?;
                    sink.line(&format!(
                        "{},{},{}",
                        fmt_sig(alpha, digits),
                        fmt_sig(theta, digits),
                        fmt_sig(dens, digits)
                    ))?;
                }
            }
        }
        "kappa" => {
            sink.line("alpha,kappa,density")?;
            for &alpha in &alphas {
                for i in 1..500 {
                    let kappa = i as f64 / 500.0;
                    let dens = kappa_prior_pdf(alpha, kappa)?;
                    sink.line(&format!(
                        "{},{},{}",
                        fmt_sig(alpha, digits),
                        fmt_sig(kappa, digits),
                        fmt_sig(dens, digits)
                    ))?;
                }
            }
        }
        other => {
            return Err(Error::domain(format!(
                "plot-data expects `prior` or `kappa`, got `{other}`"
            )));
        }
    }
    Ok(())
}

// Checked writes so a full disk surfaces as a data error, not a panic.
impl Sink {
    fn line(&mut self, s: &str) -> Result<(), Error> {
        writeln!(self.writer(), "{s}").map_err(|e| Error::data(format!("write failed: {e}")))
    }
}
