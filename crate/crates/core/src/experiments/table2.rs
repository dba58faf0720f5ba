use serde::{Deserialize, Serialize};

use super::{run_rate_study, ExperimentConfig, RateFit, TheoreticalSlope};
use crate::designs::Scheme;
use crate::error::Result;

/// `(ν₀, ν)` pairs of the oversmoothing study, in report order.
pub const TABLE2_PAIRS: [(f64, f64); 4] = [(1.1, 1.3), (1.1, 2.8), (2.1, 2.8), (1.5, 3.5)];

/// The eight configurations (four pairs, random then grid) sharing every
/// other setting with `template`.
pub fn table2_configs(template: &ExperimentConfig) -> Vec<ExperimentConfig> {
    TABLE2_PAIRS
        .iter()
        .flat_map(|&(nu0, nu)| {
            [Scheme::Random, Scheme::Grid].into_iter().map(move |scheme| ExperimentConfig {
                nu0,
                nu,
                scheme,
                ..template.clone()
            })
        })
        .collect()
}

/// A configuration together with its fitted rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRun {
    pub config: ExperimentConfig,
    pub fit: RateFit,
}

/// One line of the rate comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub nu0: f64,
    pub nu: f64,
    pub scheme: Scheme,
    pub sample_sizes: Vec<usize>,
    pub estimated_slope: f64,
    pub theoretical_slope: TheoreticalSlope,
    /// `|ES − TS| / TS`, only when the theory predicts convergence.
    pub relative_difference: Option<f64>,
    pub r_squared: f64,
    pub dropped_replications: usize,
}

impl StudyRun {
    pub fn row(&self) -> Table2Row {
        let ts = self.fit.theoretical_slope;
        let relative_difference = (ts.converges() && ts.value() > 0.0)
            .then(|| (self.fit.slope - ts.value()).abs() / ts.value());
        Table2Row {
            nu0: self.config.nu0,
            nu: self.config.nu,
            scheme: self.config.scheme,
            sample_sizes: self.config.sample_sizes.clone(),
            estimated_slope: self.fit.slope,
            theoretical_slope: ts,
            relative_difference,
            r_squared: self.fit.r_squared,
            dropped_replications: self.fit.dropped_replications,
        }
    }
}

/// Runs each configuration in turn.
pub fn reproduce_table2(configs: &[ExperimentConfig]) -> Result<Vec<StudyRun>> {
    configs
        .iter()
        .map(|c| {
            Ok(StudyRun {
                config: c.clone(),
                fit: run_rate_study(c)?,
            })
        })
        .collect()
}
