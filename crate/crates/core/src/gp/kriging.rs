use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;

use super::{cholesky_spd, corr_matrix_with, corr_vector, dot2, CholeskyFactor, DEFAULT_MAX_JITTER};
use crate::designs::Design;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelSpec};

/// The interpolant `x ↦ r_Φ(x)ᵀ K_Φ⁻¹ Y` with its factorization cached.
#[derive(Debug, Clone)]
pub struct KrigingModel {
    design: Design,
    observations: Vec<f64>,
    imposed: KernelSpec,
    factor: CholeskyFactor,
    weights: Vec<f64>,
    kernel: Kernel,
}

impl KrigingModel {
    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn imposed_kernel(&self) -> &KernelSpec {
        &self.imposed
    }

    pub fn chol_factor(&self) -> &CholeskyFactor {
        &self.factor
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn jitter_used(&self) -> f64 {
        self.factor.jitter_used()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let kernel = &self.kernel;
        // weights of near-singular systems are large and alternate in sign
        dot2(
            self.design
                .points()
                .iter()
                .zip(&self.weights)
                .map(|(p, &w)| (kernel.corr_points(p, x), w)),
        )
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

/// Fits the kriging interpolant of `observations` on `design` under `imposed`.
pub fn fit_kriging(design: &Design, observations: &[f64], imposed: &KernelSpec) -> Result<KrigingModel> {
    if observations.len() != design.len() {
        return Err(Error::Contract(format!(
            "{} observations for {} design points",
            observations.len(),
            design.len()
        )));
    }
    let kernel = Kernel::new(*imposed, design.dim())?;
    let mut matrix = corr_matrix_with(&kernel, design.points());
    let factor = cholesky_spd(&matrix, DEFAULT_MAX_JITTER)?;
    for i in 0..design.len() {
        matrix[(i, i)] += factor.jitter_used();
    }
    let weights = refine(&matrix, &factor, observations);
    Ok(KrigingModel {
        design: design.clone(),
        observations: observations.to_vec(),
        imposed: *imposed,
        factor,
        weights,
        kernel,
    })
}

const MAX_REFINEMENTS: usize = 4;

/// Solves `M w = y` and polishes `w` by iterative refinement with residuals
/// accumulated in [`dot2`]. Stops once the residual stops halving.
fn refine(matrix: &DMatrix<f64>, factor: &CholeskyFactor, y: &[f64]) -> Vec<f64> {
    let residual = |w: &[f64]| -> Vec<f64> {
        (0..y.len())
            .map(|i| -dot2(matrix.row(i).iter().copied().zip(w.iter().copied()).chain([(y[i], -1.0)])))
            .collect()
    };
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut w = factor.solve(y);
    let mut r = residual(&w);
    let mut r_norm = max_abs(&r);
    for _ in 0..MAX_REFINEMENTS {
        if r_norm == 0.0 {
            break;
        }
        let delta = factor.solve(&r);
        let candidate: Vec<f64> = w.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let r_next = residual(&candidate);
        let next_norm = max_abs(&r_next);
        if !(next_norm < r_norm) {
            break;
        }
        let converged = next_norm > 0.5 * r_norm;
        w = candidate;
        r = r_next;
        r_norm = next_norm;
        if converged {
            break;
        }
    }
    w
}

/// Free-function form of [`KrigingModel::predict`].
pub fn predict(model: &KrigingModel, x: &[f64]) -> f64 {
    model.predict(x)
}

/// Evaluates the power function `P²` and quasi-power function `Q²` for a fixed
/// design, caching the factorizations of `K_Ψ` and `K_Φ`.
#[derive(Debug)]
pub struct PowerEvaluator {
    truth: Kernel,
    imposed: Kernel,
    points: Vec<Vec<f64>>,
    truth_matrix: DMatrix<f64>,
    truth_factor: CholeskyFactor,
    imposed_factor: CholeskyFactor,
    clamped: AtomicUsize,
}

impl PowerEvaluator {
    pub fn new(true_kernel: &KernelSpec, imposed: &KernelSpec, design: &Design) -> Result<Self> {
        let truth = Kernel::new(*true_kernel, design.dim())?;
        let imposed_k = Kernel::new(*imposed, design.dim())?;
        let truth_matrix = corr_matrix_with(&truth, design.points());
        let truth_factor = cholesky_spd(&truth_matrix, DEFAULT_MAX_JITTER)?;
        let imposed_factor = if imposed == true_kernel {
            truth_factor.clone()
        } else {
            cholesky_spd(&corr_matrix_with(&imposed_k, design.points()), DEFAULT_MAX_JITTER)?
        };
        Ok(Self {
            truth,
            imposed: imposed_k,
            points: design.points().to_vec(),
            truth_matrix,
            truth_factor,
            imposed_factor,
            clamped: AtomicUsize::new(0),
        })
    }

    /// How many evaluations were negative from roundoff and clamped to 0.
    pub fn clamped_count(&self) -> usize {
        self.clamped.load(Ordering::Relaxed)
    }

    fn clamp(&self, v: f64) -> f64 {
        if v < 0.0 {
            self.clamped.fetch_add(1, Ordering::Relaxed);
            0.0
        } else {
            v
        }
    }

    /// `P²(x) = σ² (1 − r_Ψᵀ K_Ψ⁻¹ r_Ψ)`.
    pub fn power(&self, x: &[f64]) -> f64 {
        let r = corr_vector(&self.truth, &self.points, x);
        let y = self.truth_factor.solve_lower(&r);
        let quad: f64 = y.iter().map(|v| v * v).sum();
        self.clamp(self.truth.sigma2() * (1.0 - quad))
    }

    /// `Q²(x) = σ² (1 − 2 r_Ψᵀ c + cᵀ K_Ψ c)` with `c = K_Φ⁻¹ r_Φ`.
    pub fn quasi_power(&self, x: &[f64]) -> f64 {
        let r_true = corr_vector(&self.truth, &self.points, x);
        let r_imp = corr_vector(&self.imposed, &self.points, x);
        let c = self.imposed_factor.solve(&r_imp);
        let cross: f64 = r_true.iter().zip(&c).map(|(a, b)| a * b).sum();
        let quad: f64 = self
            .truth_matrix
            .column_iter()
            .zip(&c)
            .map(|(col, ci)| ci * col.iter().zip(&c).map(|(k, cj)| k * cj).sum::<f64>())
            .sum();
        self.clamp(self.truth.sigma2() * (1.0 - 2.0 * cross + quad))
    }
}

/// Conditional variance of `Z(x)` given the design values under the true kernel.
pub fn power_function(true_kernel: &KernelSpec, design: &Design, x: &[f64]) -> Result<f64> {
    Ok(PowerEvaluator::new(true_kernel, true_kernel, design)?.power(x))
}

/// Mean-squared error of the kriging predictor built with `imposed` when the
/// process follows `true_kernel`.
pub fn quasi_power(true_kernel: &KernelSpec, imposed: &KernelSpec, design: &Design, x: &[f64]) -> Result<f64> {
    Ok(PowerEvaluator::new(true_kernel, imposed, design)?.quasi_power(x))
}
