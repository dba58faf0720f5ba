use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal shifts tried, in order, until a Cholesky factorization succeeds.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

/// Largest shift on the default ladder.
pub const DEFAULT_MAX_JITTER: f64 = 1e-8;

/// Lower-triangular factor `L` with `L Lᵀ = M + jitter·I`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CholeskyFactor {
    n: usize,
    lower: Vec<f64>,
    jitter: f64,
}

impl CholeskyFactor {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn jitter_used(&self) -> f64 {
        self.jitter
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.lower[i * self.n..i * self.n + i + 1]
    }

    pub fn lower(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| if j <= i { self.lower[i * self.n + j] } else { 0.0 })
    }

    /// `L z`.
    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), &z[..=i])).collect()
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut y = b.to_vec();
        for i in 0..self.n {
            let row = self.row(i);
            y[i] = (y[i] - dot(&row[..i], &y[..i])) / row[i];
        }
        y
    }

    /// Solves `(M + jitter·I) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.solve_lower(b);
        for i in (0..self.n).rev() {
            let row = self.row(i);
            x[i] /= row[i];
            let xi = x[i];
            for (xk, lik) in x[..i].iter_mut().zip(&row[..i]) {
                *xk -= lik * xi;
            }
        }
        x
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain Cholesky of `m + shift·I`; on failure returns the 1-based order of the
/// first leading minor that is not positive.
fn try_factor(m: &DMatrix<f64>, shift: f64) -> std::result::Result<Vec<f64>, usize> {
    let n = m.nrows();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s = dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
            if i == j {
                let d = m[(i, i)] + shift - s;
                if !(d > 0.0) || !d.is_finite() {
                    return Err(i + 1);
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (m[(i, j)] - s) / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Cholesky factorization with the jitter escalation ladder, capped at `max_jitter`.
pub fn cholesky_spd(m: &DMatrix<f64>, max_jitter: f64) -> Result<CholeskyFactor> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Contract(format!("matrix is {}x{}, not square", n, m.ncols())));
    }
    let mut failed_at = 0;
    for &shift in JITTER_LADDER.iter().filter(|&&j| j <= max_jitter) {
        match try_factor(m, shift) {
            Ok(lower) => {
                return Ok(CholeskyFactor {
                    n,
                    lower,
                    jitter: shift,
                })
            }
            Err(minor) => failed_at = minor,
        }
    }
    Err(Error::IllConditioned {
        size: n,
        minor: failed_at,
        max_jitter,
    })
}
