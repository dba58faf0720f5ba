//! Isotropic correlation functions: the Matérn family (with its spectral
//! density) and the compactly supported generalized Wendland family.
//!
//! Kernels are functions of the distance `r = ‖x − x′‖`. [`KernelSpec`] is the
//! serializable description; [`Kernel`] is a validated, ready-to-evaluate form
//! with normalizing constants precomputed.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::specfun::{bessel_k_unchecked, ln_gamma_pos};

/// Below this scaled distance `2√ν φ r` the Matérn correlation is reported as
/// its limit 1; the product form `z^ν K_ν(z)` is indeterminate there.
pub const MATERN_ZERO_CUTOFF: f64 = f64::EPSILON;

const WENDLAND_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    Matern {
        /// Smoothness.
        nu: f64,
    },
    GeneralizedWendland {
        kappa: f64,
        mu: f64,
    },
}

fn default_sigma2() -> f64 {
    1.0
}

/// Description of a stationary isotropic covariance `σ² Ψ(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub family: KernelFamily,
    /// Inverse length-scale.
    pub phi: f64,
    /// Process variance.
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
}

impl KernelSpec {
    pub fn matern(nu: f64, phi: f64) -> Self {
        Self {
            family: KernelFamily::Matern { nu },
            phi,
            sigma2: 1.0,
        }
    }

    pub fn wendland(kappa: f64, mu: f64, phi: f64) -> Self {
        Self {
            family: KernelFamily::GeneralizedWendland { kappa, mu },
            phi,
            sigma2: 1.0,
        }
    }

    pub fn with_sigma2(mut self, sigma2: f64) -> Self {
        self.sigma2 = sigma2;
        self
    }

    /// Matérn smoothness, if this is a Matérn kernel.
    pub fn nu(&self) -> Option<f64> {
        match self.family {
            KernelFamily::Matern { nu } => Some(nu),
            KernelFamily::GeneralizedWendland { .. } => None,
        }
    }

    /// Checks parameter constraints for use in ambient dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::Config("ambient dimension must be at least 1".into()));
        }
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(Error::Config(format!("phi must be positive, got {}", self.phi)));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::Config(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        match self.family {
            KernelFamily::Matern { nu } => {
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(Error::Config(format!("nu must be positive, got {nu}")));
                }
            }
            KernelFamily::GeneralizedWendland { kappa, mu } => {
                if !(kappa > 0.0 && kappa.is_finite()) {
                    return Err(Error::Config(format!("kappa must be positive, got {kappa}")));
                }
                let min_mu = (dim as f64 + 1.0) / 2.0 + kappa;
                if !(mu >= min_mu && mu.is_finite()) {
                    return Err(Error::Config(format!(
                        "generalized Wendland needs mu >= (d+1)/2 + kappa = {min_mu}, got {mu}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Pair of true (`nu0`) and imposed (`nu`) smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessPair {
    pub nu0: f64,
    pub nu: f64,
}

impl SmoothnessPair {
    pub fn new(nu0: f64, nu: f64) -> Result<Self> {
        if nu0 > 0.0 && nu > 0.0 && nu0.is_finite() && nu.is_finite() {
            Ok(Self { nu0, nu })
        } else {
            Err(Error::Config(format!(
                "smoothness values must be positive, got nu0={nu0}, nu={nu}"
            )))
        }
    }

    pub fn is_oversmoothed(&self) -> bool {
        self.nu > self.nu0
    }
}

/// A validated kernel with precomputed constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    spec: KernelSpec,
    form: Form,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Form {
    Matern {
        nu: f64,
        /// 2√ν φ
        scale: f64,
        /// ln(1 / (Γ(ν) 2^{ν−1}))
        ln_norm: f64,
    },
    Wendland {
        kappa: f64,
        mu: f64,
        phi: f64,
        inv_beta: f64,
    },
}

impl Kernel {
    pub fn new(spec: KernelSpec, dim: usize) -> Result<Self> {
        spec.validate(dim)?;
        let form = match spec.family {
            KernelFamily::Matern { nu } => Form::Matern {
                nu,
                scale: 2.0 * nu.sqrt() * spec.phi,
                ln_norm: -ln_gamma_pos(nu) - (nu - 1.0) * LN_2,
            },
            KernelFamily::GeneralizedWendland { kappa, mu } => {
                let ln_beta = ln_gamma_pos(2.0 * kappa) + ln_gamma_pos(mu + 1.0)
                    - ln_gamma_pos(2.0 * kappa + mu + 1.0);
                Form::Wendland {
                    kappa,
                    mu,
                    phi: spec.phi,
                    inv_beta: (-ln_beta).exp(),
                }
            }
        };
        Ok(Self { spec, form })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn sigma2(&self) -> f64 {
        self.spec.sigma2
    }

    /// Correlation Ψ(r) for a distance `r >= 0`.
    pub fn corr(&self, r: f64) -> f64 {
        match self.form {
            Form::Matern { nu, scale, ln_norm } => matern_scaled(nu, ln_norm, scale * r),
            Form::Wendland {
                kappa,
                mu,
                phi,
                inv_beta,
            } => wendland_scaled(kappa, mu, inv_beta, phi * r),
        }
    }

    /// Correlation between two points.
    pub fn corr_points(&self, a: &[f64], b: &[f64]) -> f64 {
        self.corr(distance(a, b))
    }

    /// Covariance `σ² Ψ(r)`.
    pub fn cov(&self, r: f64) -> f64 {
        self.spec.sigma2 * self.corr(r)
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn matern_scaled(nu: f64, ln_norm: f64, z: f64) -> f64 {
    if z < MATERN_ZERO_CUTOFF {
        return 1.0;
    }
    let v = (ln_norm + nu * z.ln()).exp() * bessel_k_unchecked(nu, z);
    if v.is_finite() {
        v.min(1.0)
    } else {
        // K_ν overflowed: z is so small that Ψ rounds to 1
        1.0
    }
}

fn wendland_scaled(kappa: f64, mu: f64, inv_beta: f64, s: f64) -> f64 {
    if s >= 1.0 {
        return 0.0;
    }
    if s == 0.0 {
        // the integral is B(2κ, μ + 1) itself
        return 1.0;
    }
    let integral = if kappa < 1.0 {
        // u = s + (1 − s) w^{1/κ} removes the (u − s)^{κ−1} endpoint singularity
        let inv_k = 1.0 / kappa;
        let pref = (1.0 - s).powf(kappa) / kappa;
        integrate_adaptive(
            |w| {
                let u = s + (1.0 - s) * w.powf(inv_k);
                u * (u + s).powf(kappa - 1.0) * (1.0 - u).powf(mu)
            },
            0.0,
            1.0,
            WENDLAND_REL_TOL,
        ) * pref
    } else {
        integrate_adaptive(
            |u| u * (u * u - s * s).max(0.0).powf(kappa - 1.0) * (1.0 - u).powf(mu),
            s,
            1.0,
            WENDLAND_REL_TOL,
        )
    };
    (integral * inv_beta).clamp(0.0, 1.0)
}

fn check_distance(r: f64) -> Result<()> {
    if r >= 0.0 && !r.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("distance must be nonnegative, got {r}")))
    }
}

/// Matérn correlation `Ψ(r; ν, φ)`.
pub fn matern_corr(spec: &KernelSpec, r: f64) -> Result<f64> {
    check_distance(r)?;
    match spec.family {
        KernelFamily::Matern { .. } => Ok(Kernel::new(*spec, 1)?.corr(r)),
        _ => Err(Error::Config("matern_corr requires a Matérn kernel".into())),
    }
}

/// Matérn spectral density at frequency norm `‖ω‖` in dimension `dim`.
pub fn matern_spectral(spec: &KernelSpec, omega_norm: f64, dim: usize) -> Result<f64> {
    let KernelFamily::Matern { nu } = spec.family else {
        return Err(Error::Config("matern_spectral requires a Matérn kernel".into()));
    };
    spec.validate(dim)?;
    if !(omega_norm >= 0.0) {
        return Err(Error::Domain(format!(
            "frequency norm must be nonnegative, got {omega_norm}"
        )));
    }
    let half_d = dim as f64 / 2.0;
    let a = 4.0 * nu * spec.phi * spec.phi;
    let ln_f = -half_d * PI.ln() + ln_gamma_pos(nu + half_d) - ln_gamma_pos(nu) + nu * a.ln()
        - (nu + half_d) * (a + omega_norm * omega_norm).ln();
    Ok(ln_f.exp())
}

/// Generalized Wendland correlation in ambient dimension `dim`.
pub fn wendland_corr(spec: &KernelSpec, r: f64, dim: usize) -> Result<f64> {
    check_distance(r)?;
    match spec.family {
        KernelFamily::GeneralizedWendland { .. } => Ok(Kernel::new(*spec, dim)?.corr(r)),
        _ => Err(Error::Config(
            "wendland_corr requires a generalized Wendland kernel".into(),
        )),
    }
}
