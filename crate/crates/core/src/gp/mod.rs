//! Gaussian-process simulation and kriging under a possibly misspecified kernel.

mod factor;
mod kriging;
mod norm;
mod sample;

use nalgebra::DMatrix;

pub use factor::{cholesky_spd, CholeskyFactor, DEFAULT_MAX_JITTER, JITTER_LADDER};
pub use kriging::{fit_kriging, power_function, predict, quasi_power, KrigingModel, PowerEvaluator};
pub use norm::{empirical_error, ErrorNormSpec, NormKind};
pub use sample::{sample_gp, GpSample};
pub(crate) use sample::sample_with;

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelSpec};

pub(crate) fn point_dim(points: &[Vec<f64>]) -> Result<usize> {
    let dim = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Contract("empty point list".into()))?;
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::Contract("points must share a positive dimension".into()));
    }
    Ok(dim)
}

/// Correlation matrix `(Ψ(‖x_j − x_k‖))_{jk}`.
pub fn corr_matrix(kernel: &KernelSpec, points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let k = Kernel::new(*kernel, point_dim(points)?)?;
    Ok(corr_matrix_with(&k, points))
}

pub(crate) fn corr_matrix_with(kernel: &Kernel, points: &[Vec<f64>]) -> DMatrix<f64> {
    let n = points.len();
    let mut m = DMatrix::identity(n, n);
    for j in 0..n {
        for i in j + 1..n {
            let v = kernel.corr_points(&points[i], &points[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `Σ aᵢbᵢ` evaluated as if in twice the working precision (Ogita, Rump and
/// Oishi's Dot2), then rounded once.
pub(crate) fn dot2(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut hi = 0.0f64;
    let mut lo = 0.0f64;
    for (a, b) in pairs {
        let p = a * b;
        let p_err = a.mul_add(b, -p);
        let s = hi + p;
        let bb = s - hi;
        let s_err = (hi - (s - bb)) + (p - bb);
        hi = s;
        lo += s_err + p_err;
    }
    hi + lo
}

/// `r(x) = (Ψ(‖x − x_j‖))_j`.
pub(crate) fn corr_vector(kernel: &Kernel, points: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    points.iter().map(|p| kernel.corr_points(p, x)).collect()
}
