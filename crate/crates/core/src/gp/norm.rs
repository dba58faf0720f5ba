use serde::{Deserialize, Serialize};

use super::sample::point_key;
use super::{GpSample, KrigingModel};
use crate::designs::Design;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    Sup,
    Lp { p: f64 },
}

impl NormKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormKind::Lp { p } if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::Config(format!("L_p norm needs finite p >= 1, got {p}")))
            }
            _ => Ok(()),
        }
    }

    /// Aggregates absolute errors by equal-weight quadrature over a domain of volume `volume`.
    pub fn aggregate(&self, abs_errors: &[f64], volume: f64) -> f64 {
        match *self {
            NormKind::Sup => abs_errors.iter().copied().fold(0.0, f64::max),
            NormKind::Lp { p } => {
                let m = abs_errors.len() as f64;
                let s: f64 = abs_errors.iter().map(|e| e.powf(p)).sum();
                (volume / m * s).powf(1.0 / p)
            }
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormKind::Sup => f.write_str("sup"),
            NormKind::Lp { p } => write!(f, "l{p}"),
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let kind = match s.as_str() {
            "sup" | "inf" | "uniform" => NormKind::Sup,
            _ => {
                let p = s
                    .strip_prefix("lp:")
                    .or_else(|| s.strip_prefix('l'))
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("unknown norm '{s}' (sup, l1, l2, lp:<p>)")))?;
                NormKind::Lp { p }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Norm of the prediction error approximated on a finite evaluation set `Ω₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorNormSpec {
    pub kind: NormKind,
    pub eval_set: Design,
}

/// `‖Z − 𝓘Z‖` over `norm.eval_set`. Every evaluation point must appear in the sample.
pub fn empirical_error(sample: &GpSample, model: &KrigingModel, norm: &ErrorNormSpec) -> Result<f64> {
    norm.kind.validate()?;
    let index = sample.index();
    let abs_errors = norm
        .eval_set
        .points()
        .iter()
        .map(|x| {
            index
                .get(&point_key(x))
                .map(|z| (z - model.predict(x)).abs())
                .ok_or_else(|| Error::Contract(format!("evaluation point {x:?} is not in the sample")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(norm.kind.aggregate(&abs_errors, norm.eval_set.domain().volume()))
}
