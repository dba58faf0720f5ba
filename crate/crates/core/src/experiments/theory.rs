use serde::{Deserialize, Serialize};

use crate::designs::Scheme;
use crate::gp::NormKind;
use crate::kernels::SmoothnessPair;

/// Predicted exponent `α` in `error ≍ n^{−α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TheoreticalSlope {
    Rate(f64),
    /// Rate up to a logarithmic factor coming from `h_n ≍ n^{-1/d} log n`.
    RateWithLogFactor(f64),
    /// The upper bound exponent is not positive; the predictor may be inconsistent.
    NoConvergence(f64),
}

impl TheoreticalSlope {
    pub fn value(&self) -> f64 {
        match *self {
            TheoreticalSlope::Rate(v)
            | TheoreticalSlope::RateWithLogFactor(v)
            | TheoreticalSlope::NoConvergence(v) => v,
        }
    }

    pub fn converges(&self) -> bool {
        !matches!(self, TheoreticalSlope::NoConvergence(_))
    }
}

impl std::fmt::Display for TheoreticalSlope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TheoreticalSlope::Rate(v) => write!(f, "{v}"),
            TheoreticalSlope::RateWithLogFactor(v) => write!(f, "{v} (up to log factor)"),
            TheoreticalSlope::NoConvergence(v) => write!(f, "{v} (no convergence)"),
        }
    }
}

/// Rate exponent of the kriging error in `n` for a design scheme in dimension `dim`.
///
/// Quasi-uniform schemes (grid, Halton) attain `min(ν, ν₀)/d`. Random sampling
/// with `ν > ν₀` gives `(2ν₀ − ν)/d` from `h^{ν₀} ρ^{ν−ν₀}` with `ρ ≍ n log n`;
/// with `ν ≤ ν₀` the rate is `ν/d` up to a log factor. The exponent does not
/// depend on the norm beyond log factors.
pub fn theoretical_slope(pair: SmoothnessPair, scheme: Scheme, _norm: NormKind, dim: usize) -> TheoreticalSlope {
    let d = dim.max(1) as f64;
    let SmoothnessPair { nu0, nu } = pair;
    match scheme {
        Scheme::Grid | Scheme::Halton => TheoreticalSlope::Rate(nu.min(nu0) / d),
        Scheme::Random | Scheme::External => {
            if nu > nu0 {
                let v = round_exponent((2.0 * nu0 - nu) / d);
                if v > 0.0 {
                    TheoreticalSlope::Rate(v)
                } else {
                    TheoreticalSlope::NoConvergence(v)
                }
            } else {
                TheoreticalSlope::RateWithLogFactor(nu / d)
            }
        }
    }
}

// strips representation noise such as 2*1.1 - 1.3 = 0.9000000000000001
fn round_exponent(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(nu0: f64, nu: f64, s: Scheme) -> TheoreticalSlope {
        theoretical_slope(SmoothnessPair::new(nu0, nu).unwrap(), s, NormKind::Sup, 1)
    }

    #[test]
    fn table_values() {
        assert_eq!(ts(1.1, 1.3, Scheme::Random), TheoreticalSlope::Rate(0.9));
        assert_eq!(ts(1.1, 1.3, Scheme::Grid), TheoreticalSlope::Rate(1.1));
        assert_eq!(ts(1.1, 2.8, Scheme::Random), TheoreticalSlope::NoConvergence(-0.6));
        assert_eq!(ts(2.1, 2.8, Scheme::Grid), TheoreticalSlope::Rate(2.1));
        assert_eq!(ts(2.1, 2.8, Scheme::Random), TheoreticalSlope::Rate(1.4));
        assert_eq!(ts(1.5, 3.5, Scheme::Random), TheoreticalSlope::NoConvergence(-0.5));
        assert_eq!(ts(1.5, 3.5, Scheme::Grid), TheoreticalSlope::Rate(1.5));
    }

    #[test]
    fn undersmoothed() {
        assert_eq!(ts(2.0, 1.2, Scheme::Grid), TheoreticalSlope::Rate(1.2));
        assert_eq!(ts(2.0, 1.2, Scheme::Random), TheoreticalSlope::RateWithLogFactor(1.2));
        // boundary 2ν₀ = ν
        assert!(!ts(1.0, 2.0, Scheme::Random).converges());
    }
}
