//! Convergence-rate studies: replicate GP draws over increasing sample sizes,
//! measure the kriging error, and regress `log(mean error)` on `log(1/n)`.

mod ols;
mod table2;
mod theory;

pub use ols::{ols_fit, OlsFit};
pub use table2::{reproduce_table2, table2_configs, StudyRun, Table2Row, TABLE2_PAIRS};
pub use theory::{theoretical_slope, TheoreticalSlope};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::designs::{gen_grid, gen_halton, gen_random, Design, Domain, Scheme};
use crate::error::{Error, Result};
use crate::gp::{self, fit_kriging, ErrorNormSpec, NormKind};
use crate::kernels::{Kernel, KernelSpec, SmoothnessPair};

/// Largest fraction of replications that may be dropped for failed factorizations.
pub const MAX_DROP_FRACTION: f64 = 0.10;

fn default_phi() -> f64 {
    1.0
}
fn default_sigma2() -> f64 {
    1.0
}
fn default_sample_sizes() -> Vec<usize> {
    (2..=15).map(|k| 10 * k).collect()
}
fn default_replications() -> usize {
    30
}
fn default_eval_points() -> usize {
    200
}
fn default_norm() -> NormKind {
    NormKind::Sup
}
fn default_seed() -> u64 {
    20_200_531
}

/// One rate study. Every field except the smoothness pair and scheme has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// True smoothness ν₀.
    pub nu0: f64,
    /// Imposed smoothness ν.
    pub nu: f64,
    #[serde(default = "default_phi")]
    pub phi: f64,
    /// Scale of the imposed kernel; `None` means the same as `phi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_imposed: Option<f64>,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    pub scheme: Scheme,
    #[serde(default = "default_sample_sizes")]
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_eval_points")]
    pub eval_points: usize,
    #[serde(default = "default_norm")]
    pub norm: NormKind,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    #[serde(default)]
    pub domain: Domain,
}

impl ExperimentConfig {
    pub fn new(nu0: f64, nu: f64, scheme: Scheme) -> Self {
        Self {
            nu0,
            nu,
            phi: default_phi(),
            phi_imposed: None,
            sigma2: default_sigma2(),
            scheme,
            sample_sizes: default_sample_sizes(),
            replications: default_replications(),
            eval_points: default_eval_points(),
            norm: default_norm(),
            base_seed: default_seed(),
            domain: Domain::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        SmoothnessPair::new(self.nu0, self.nu)?;
        let dim = self.domain.dim();
        Kernel::new(self.true_kernel(), dim)?;
        Kernel::new(self.imposed_kernel(), dim)?;
        if self.scheme == Scheme::External {
            return Err(Error::Config("rate studies need a generated design scheme".into()));
        }
        if self.sample_sizes.len() < 3 {
            return Err(Error::Config("rate study needs at least 3 sample sizes".into()));
        }
        if self.sample_sizes[0] < 2 || self.sample_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "sample sizes must be strictly increasing and at least 2".into(),
            ));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.eval_points == 0 {
            return Err(Error::Config("eval_points must be at least 1".into()));
        }
        self.norm.validate()
    }

    pub fn smoothness(&self) -> SmoothnessPair {
        SmoothnessPair {
            nu0: self.nu0,
            nu: self.nu,
        }
    }

    /// Ψ with smoothness ν₀.
    pub fn true_kernel(&self) -> KernelSpec {
        KernelSpec::matern(self.nu0, self.phi).with_sigma2(self.sigma2)
    }

    /// Φ with smoothness ν.
    pub fn imposed_kernel(&self) -> KernelSpec {
        KernelSpec::matern(self.nu, self.phi_imposed.unwrap_or(self.phi)).with_sigma2(self.sigma2)
    }

    pub fn theoretical_slope(&self) -> TheoreticalSlope {
        theoretical_slope(self.smoothness(), self.scheme, self.norm, self.domain.dim())
    }

    pub fn eval_design(&self) -> Result<Design> {
        gen_halton(&self.domain, self.eval_points)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep` at sample size `n`, independent of execution order.
pub fn replication_seed(base_seed: u64, n: usize, rep: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ n as u64) ^ rep as u64)
}

/// Errors from one replication, one per requested norm, plus numerical flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub errors: Vec<f64>,
    /// Jitter needed to factor the joint covariance for sampling.
    pub sample_jitter: f64,
    /// Jitter needed to factor `K_Φ` for the interpolant.
    pub fit_jitter: f64,
}

/// Runs replication `rep` at size `n`. `Ok(None)` means the replication was
/// dropped because a factorization failed at the largest jitter.
pub fn replicate(
    config: &ExperimentConfig,
    n: usize,
    rep: usize,
    eval: &Design,
    norms: &[NormKind],
) -> Result<Option<ReplicationOutcome>> {
    let seed = replication_seed(config.base_seed, n, rep);
    let design = match config.scheme {
        Scheme::Random => gen_random(&config.domain, n, splitmix64(seed))?,
        Scheme::Grid => gen_grid(&config.domain, n)?,
        Scheme::Halton => gen_halton(&config.domain, n)?,
        Scheme::External => unreachable!("rejected by validate"),
    };
    let mut joint: Vec<Vec<f64>> = design.points().to_vec();
    joint.extend_from_slice(eval.points());

    let truth = Kernel::new(config.true_kernel(), config.domain.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = match gp::sample_with(&truth, &joint, &mut rng, seed) {
        Ok(s) => s,
        Err(Error::IllConditioned { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let model = match fit_kriging(&design, &sample.values[..n], &config.imposed_kernel()) {
        Ok(m) => m,
        Err(Error::IllConditioned { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };

    let truth_at_eval = &sample.values[n..];
    let abs_err: Vec<f64> = eval
        .points()
        .iter()
        .zip(truth_at_eval)
        .map(|(x, z)| (z - model.predict(x)).abs())
        .collect();
    let volume = config.domain.volume();
    Ok(Some(ReplicationOutcome {
        errors: norms.iter().map(|k| k.aggregate(&abs_err, volume)).collect(),
        sample_jitter: sample.jitter_used,
        fit_jitter: model.jitter_used(),
    }))
}

/// Per-sample-size summary, including every replication error for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub mean_error: f64,
    /// Errors of the kept replications, in replication order.
    pub errors: Vec<f64>,
    pub dropped: usize,
    /// Kept replications whose interpolant needed a nonzero jitter.
    pub jittered_fits: usize,
    pub max_sample_jitter: f64,
}

/// Outcome of a rate study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub theoretical_slope: TheoreticalSlope,
    pub per_n_mean_error: Vec<(usize, f64)>,
    pub dropped_replications: usize,
    pub cells: Vec<CellSummary>,
}

impl RateFit {
    /// Regression data `(log(1/n), log mean error)`.
    pub fn plot_points(&self) -> Vec<(f64, f64)> {
        self.per_n_mean_error
            .iter()
            .map(|&(n, e)| ((1.0 / n as f64).ln(), e.ln()))
            .collect()
    }
}

/// Runs the full protocol for `config` and fits the log-log regression.
///
/// Replications run on the current rayon pool; seeds are derived per
/// `(n, replication)` so the result does not depend on the thread count.
pub fn run_rate_study(config: &ExperimentConfig) -> Result<RateFit> {
    run_rate_study_norms(config, &[config.norm]).map(|mut v| v.remove(0))
}

/// Like [`run_rate_study`] but evaluates several norms on the same draws,
/// returning one fit per norm.
pub fn run_rate_study_norms(config: &ExperimentConfig, norms: &[NormKind]) -> Result<Vec<RateFit>> {
    config.validate()?;
    if norms.is_empty() {
        return Err(Error::Config("at least one norm is required".into()));
    }
    for k in norms {
        k.validate()?;
    }
    let eval = config.eval_design()?;
    let jobs: Vec<(usize, usize)> = config
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..config.replications).map(move |r| (n, r)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(n, rep)| replicate(config, n, rep, &eval, norms))
        .collect::<Result<Vec<_>>>()?;

    let total_dropped = outcomes.iter().filter(|o| o.is_none()).count();
    if total_dropped as f64 > MAX_DROP_FRACTION * jobs.len() as f64 {
        return Err(Error::Experiment(format!(
            "{total_dropped} of {} replications failed to factorize (limit {:.0}%)",
            jobs.len(),
            100.0 * MAX_DROP_FRACTION
        )));
    }

    let theoretical = config.theoretical_slope();
    let reps = config.replications;
    let mut fits = Vec::with_capacity(norms.len());
    for which in 0..norms.len() {
        let mut cells = Vec::with_capacity(config.sample_sizes.len());
        for (ci, &n) in config.sample_sizes.iter().enumerate() {
            let chunk = &outcomes[ci * reps..(ci + 1) * reps];
            let kept: Vec<&ReplicationOutcome> = chunk.iter().flatten().collect();
            if kept.is_empty() {
                return Err(Error::Experiment(format!("every replication failed at n = {n}")));
            }
            let errors: Vec<f64> = kept.iter().map(|o| o.errors[which]).collect();
            let mean_error = errors.iter().sum::<f64>() / errors.len() as f64;
            if !(mean_error > 0.0) || !mean_error.is_finite() {
                return Err(Error::Experiment(format!(
                    "mean error at n = {n} is {mean_error}; cannot take its logarithm"
                )));
            }
            cells.push(CellSummary {
                n,
                mean_error,
                errors,
                dropped: chunk.len() - kept.len(),
                jittered_fits: kept.iter().filter(|o| o.fit_jitter > 0.0).count(),
                max_sample_jitter: kept.iter().map(|o| o.sample_jitter).fold(0.0, f64::max),
            });
        }
        fits.push(fit_from_cells(cells, theoretical)?);
    }
    Ok(fits)
}

/// Regression of `log(mean error)` on `log(1/n)` for precomputed cells.
pub fn fit_from_cells(cells: Vec<CellSummary>, theoretical: TheoreticalSlope) -> Result<RateFit> {
    let xs: Vec<f64> = cells.iter().map(|c| (1.0 / c.n as f64).ln()).collect();
    let ys: Vec<f64> = cells.iter().map(|c| c.mean_error.ln()).collect();
    let fit = ols_fit(&xs, &ys)?;
    Ok(RateFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        theoretical_slope: theoretical,
        per_n_mean_error: cells.iter().map(|c| (c.n, c.mean_error)).collect(),
        dropped_replications: cells.iter().map(|c| c.dropped).sum(),
        cells,
    })
}

/// Error norm over the study's evaluation set, for callers that work with
/// [`gp::empirical_error`] directly.
pub fn error_norm_spec(config: &ExperimentConfig) -> Result<ErrorNormSpec> {
    Ok(ErrorNormSpec {
        kind: config.norm,
        eval_set: config.eval_design()?,
    })
}
