//! Trained linear output layer and regression metrics.
//!
//! Features are standardized (train-set mean/std) before the solve and the
//! model keeps the standardization, so `predict` works on raw features.
//! Ridge solves the centered normal equations by Cholesky (SVD fallback for
//! the unregularized or degenerate case), OLS is a rank-revealing SVD solve,
//! and lasso is cyclic coordinate descent with soft thresholding.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReadoutKind {
    Ridge,
    Lasso,
    Ols,
}

/// Per-column affine feature standardization fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    fn fit(x: &Matrix) -> Self {
        let (n, d) = (x.rows(), x.cols());
        let mut mean = vec![0.0; d];
        for row in x.iter_rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut var = vec![0.0; d];
        for row in x.iter_rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n as f64).sqrt();
                // Constant columns carry no signal; unit scale keeps them inert.
                if sd > 1e-300 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    fn standardized(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

/// Trained affine readout `ŷ = wᵀ·standardize(x) + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub kind: ReadoutKind,
    pub reg_strength: f64,
    /// Weights in the standardized feature space.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub scaler: FeatureScaler,
    /// False when an iterative solver hit its sweep cap before its tolerance.
    pub converged: bool,
}

impl ReadoutModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut acc = self.bias;
        for ((w, v), (m, s)) in self
            .weights
            .iter()
            .zip(row)
            .zip(self.scaler.mean.iter().zip(&self.scaler.std))
        {
            acc += w * (v - m) / s;
        }
        acc
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.weights.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.weights.len(),
                got: x.cols(),
            });
        }
        Ok(x.iter_rows().map(|r| self.predict_row(r)).collect())
    }
}

/// Regression quality metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse: f64,
    pub per_sample_errors: Option<Vec<f64>>,
}

/// Mean squared error of a prediction.
pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<Metrics> {
    if y_true.len() != y_pred.len() {
        return Err(CoreError::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(CoreError::InvalidConfig("empty metric input".to_string()));
    }
    let sum: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p) * (t - p))
        .sum();
    Ok(Metrics {
        mse: sum / y_true.len() as f64,
        per_sample_errors: None,
    })
}

fn check_finite(x: &Matrix, y: &[f64]) -> Result<()> {
    if x.data().iter().any(|v| !v.is_finite()) {
        return Err(CoreError::NonFinite("feature matrix"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::NonFinite("target vector"));
    }
    Ok(())
}

/// Gram matrix `ZᵀZ` and moment vector `Zᵀy` accumulated row-wise.
fn normal_equations(z: &Matrix, y: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let d = z.cols();
    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut moment = DVector::<f64>::zeros(d);
    for (row, &t) in z.iter_rows().zip(y) {
        for i in 0..d {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            moment[i] += ri * t;
            // Upper triangle only; mirrored below.
            for j in i..d {
                gram[(i, j)] += ri * row[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            gram[(i, j)] = gram[(j, i)];
        }
    }
    (gram, moment)
}

fn ridge_solve(z: &Matrix, yc: &[f64], reg: f64) -> Result<Vec<f64>> {
    let (mut gram, moment) = normal_equations(z, yc);
    for i in 0..gram.nrows() {
        gram[(i, i)] += reg;
    }
    if let Some(chol) = gram.clone().cholesky() {
        return Ok(chol.solve(&moment).as_slice().to_vec());
    }
    // Singular normal equations (reg = 0 or heavy collinearity): fall back to
    // a rank-revealing solve.
    ols_solve(z, yc)
}

fn ols_solve(z: &Matrix, yc: &[f64]) -> Result<Vec<f64>> {
    let a = DMatrix::from_row_slice(z.rows(), z.cols(), z.data());
    let b = DVector::from_column_slice(yc);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = smax * 1e-12;
    let w = svd
        .solve(&b, eps)
        .map_err(|e| CoreError::SolveFailed(e.to_string()))?;
    Ok(w.as_slice().to_vec())
}

/// Cyclic coordinate descent for `(1/2T)·‖y − Zw‖² + reg·‖w‖₁`.
fn lasso_solve(z: &Matrix, yc: &[f64], reg: f64) -> (Vec<f64>, bool) {
    let (n, d) = (z.rows(), z.cols());
    let nf = n as f64;
    // Column-major copy for the coordinate sweeps.
    let mut cols = vec![vec![0.0f64; n]; d];
    for (t, row) in z.iter_rows().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            cols[j][t] = v;
        }
    }
    let col_sq: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf)
        .collect();
    let mut w = vec![0.0f64; d];
    let mut residual = yc.to_vec();
    let tol = 1e-8;
    let max_sweeps = 10_000;
    for _sweep in 0..max_sweeps {
        let mut max_delta = 0.0f64;
        for j in 0..d {
            if col_sq[j] == 0.0 {
                continue;
            }
            let corr: f64 = cols[j]
                .iter()
                .zip(residual.iter())
                .map(|(c, r)| c * r)
                .sum::<f64>()
                / nf;
            let rho = corr + col_sq[j] * w[j];
            let new_w = soft_threshold(rho, reg) / col_sq[j];
            let delta = new_w - w[j];
            if delta != 0.0 {
                for (r, c) in residual.iter_mut().zip(&cols[j]) {
                    *r -= delta * c;
                }
                w[j] = new_w;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < tol {
            return (w, true);
        }
    }
    (w, false)
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Fits a readout on raw features and targets.
///
/// Regularized solves handle `rows < cols` and rank deficiency; lasso
/// non-convergence is flagged on the returned model rather than failing.
pub fn fit(kind: ReadoutKind, x: &Matrix, y: &[f64], reg: f64) -> Result<ReadoutModel> {
    if x.rows() != y.len() {
        return Err(CoreError::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if x.rows() == 0 {
        return Err(CoreError::InvalidConfig("empty training set".to_string()));
    }
    if !reg.is_finite() || reg < 0.0 {
        return Err(CoreError::InvalidConfig(format!(
            "regularization must be finite and >= 0, got {reg}"
        )));
    }
    check_finite(x, y)?;

    let scaler = FeatureScaler::fit(x);
    let z = scaler.standardized(x);
    let y_mean = y.iter().sum::<f64>() / y.len() as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let (weights, converged) = match kind {
        ReadoutKind::Ridge => (ridge_solve(&z, &yc, reg)?, true),
        ReadoutKind::Ols => (ols_solve(&z, &yc)?, true),
        ReadoutKind::Lasso => lasso_solve(&z, &yc, reg),
    };

    // Standardized columns have zero mean, so the intercept is the target mean.
    Ok(ReadoutModel {
        kind,
        reg_strength: reg,
        weights,
        bias: y_mean,
        scaler,
        converged,
    })
}

/// Ridge fits for several target vectors over one feature matrix, sharing
/// the standardization, Gram matrix, and factorization across targets.
pub(crate) fn ridge_fit_multi(
    x: &Matrix,
    targets: &[Vec<f64>],
    reg: f64,
) -> Result<Vec<ReadoutModel>> {
    for y in targets {
        if y.len() != x.rows() {
            return Err(CoreError::DimensionMismatch {
                expected: x.rows(),
                got: y.len(),
            });
        }
    }
    let scaler = FeatureScaler::fit(x);
    let z = scaler.standardized(x);
    let d = z.cols();
    let mut gram = DMatrix::<f64>::zeros(d, d);
    for row in z.iter_rows() {
        for i in 0..d {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            for j in i..d {
                gram[(i, j)] += ri * row[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            gram[(i, j)] = gram[(j, i)];
        }
        gram[(i, i)] += reg;
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| CoreError::SolveFailed("gram matrix not positive definite".to_string()))?;
    targets
        .iter()
        .map(|y| {
            let y_mean = y.iter().sum::<f64>() / y.len() as f64;
            let mut moment = DVector::<f64>::zeros(d);
            for (row, &t) in z.iter_rows().zip(y) {
                let tc = t - y_mean;
                for i in 0..d {
                    moment[i] += row[i] * tc;
                }
            }
            let w = chol.solve(&moment);
            Ok(ReadoutModel {
                kind: ReadoutKind::Ridge,
                reg_strength: reg,
                weights: w.as_slice().to_vec(),
                bias: y_mean,
                scaler: scaler.clone(),
                converged: true,
            })
        })
        .collect()
}

/// Convenience: fit on a training split, return train/test predictions and MSE.
pub struct FitEval {
    pub model: ReadoutModel,
    pub train_mse: f64,
    pub test_mse: f64,
    pub test_predictions: Vec<f64>,
}

pub fn fit_eval(
    kind: ReadoutKind,
    x_train: &Matrix,
    y_train: &[f64],
    x_test: &Matrix,
    y_test: &[f64],
    reg: f64,
) -> Result<FitEval> {
    let model = fit(kind, x_train, y_train, reg)?;
    let train_pred = model.predict(x_train)?;
    let test_pred = model.predict(x_test)?;
    Ok(FitEval {
        train_mse: mse(y_train, &train_pred)?.mse,
        test_mse: mse(y_test, &test_pred)?.mse,
        test_predictions: test_pred,
        model,
    })
}
