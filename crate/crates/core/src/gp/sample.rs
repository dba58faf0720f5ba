use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{cholesky_spd, corr_matrix_with, point_dim, DEFAULT_MAX_JITTER};
use crate::error::Result;
use crate::kernels::{Kernel, KernelSpec};

/// One joint draw of a zero-mean process at a finite set of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSample {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub true_kernel: KernelSpec,
    pub seed: u64,
    /// Diagonal shift the covariance factorization needed.
    pub jitter_used: f64,
}

pub(crate) type PointKey = Vec<u64>;

pub(crate) fn point_key(p: &[f64]) -> PointKey {
    // +0.0 and -0.0 must collide
    p.iter().map(|x| (x + 0.0).to_bits()).collect()
}

impl GpSample {
    /// Lookup table from point to value.
    pub fn index(&self) -> HashMap<PointKey, f64> {
        self.points
            .iter()
            .zip(&self.values)
            .map(|(p, &v)| (point_key(p), v))
            .collect()
    }

    pub fn value_at(&self, x: &[f64]) -> Option<f64> {
        let key = point_key(x);
        self.points
            .iter()
            .position(|p| point_key(p) == key)
            .map(|i| self.values[i])
    }
}

/// Draws `Z` at `points` from the joint law `N(0, σ² K_Ψ)` using one Cholesky
/// factorization of the full correlation matrix. Exactly repeated points share
/// one value.
pub fn sample_gp(kernel: &KernelSpec, points: &[Vec<f64>], seed: u64) -> Result<GpSample> {
    let k = Kernel::new(*kernel, point_dim(points)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(&k, points, &mut rng, seed)
}

pub(crate) fn sample_with(
    kernel: &Kernel,
    points: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Result<GpSample> {
    let mut slot: HashMap<PointKey, usize> = HashMap::with_capacity(points.len());
    let mut unique: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    let owner: Vec<usize> = points
        .iter()
        .map(|p| {
            *slot.entry(point_key(p)).or_insert_with(|| {
                unique.push(p.clone());
                unique.len() - 1
            })
        })
        .collect();

    let factor = cholesky_spd(&corr_matrix_with(kernel, &unique), DEFAULT_MAX_JITTER)?;
    let z: Vec<f64> = (0..unique.len()).map(|_| StandardNormal.sample(rng)).collect();
    let sd = kernel.sigma2().sqrt();
    let draw: Vec<f64> = factor.mul_lower(&z).into_iter().map(|v| sd * v).collect();

    Ok(GpSample {
        points: points.to_vec(),
        values: owner.iter().map(|&i| draw[i]).collect(),
        true_kernel: *kernel.spec(),
        seed,
        jitter_used: factor.jitter_used(),
    })
}
