//! Kriging with misspecified Matérn smoothness.
//!
//! * [`specfun`]: Γ and the modified Bessel function `K_ν`.
//! * [`kernels`]: Matérn and generalized Wendland correlations.
//! * [`designs`]: random, grid and Halton designs; fill distance, separation
//!   radius and mesh ratio.
//! * [`gp`]: joint GP sampling, the kriging interpolant, power and quasi-power
//!   functions, empirical error norms.
//! * [`experiments`]: convergence-rate studies and their log-log regression.

pub mod csvio;
pub mod designs;
pub mod error;
pub mod experiments;
pub mod gp;
pub mod kernels;
mod quadrature;
pub mod specfun;

pub use designs::{Design, DesignMetrics, Domain, Scheme};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, RateFit, TheoreticalSlope};
pub use gp::{GpSample, KrigingModel, NormKind};
pub use kernels::{Kernel, KernelFamily, KernelSpec, SmoothnessPair};
pub use specfun::BesselOrder;
