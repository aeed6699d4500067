//! Classical comparison models: echo state network, one-hidden-layer MLP,
//! and ridge/lasso regression on raw windows.

pub mod esn;
pub mod mlp;

use crate::error::Result;
use crate::mackey_glass::WindowedDataset;
use crate::readout::{self, ReadoutKind};

pub use esn::{esn_grid_search, esn_run, EsnConfig, EsnGrid};
pub use mlp::{mlp_run, MlpConfig};

/// Test MSE of ridge and lasso fits on raw window features.
pub struct LinearBaselineResult {
    pub ridge_mse: f64,
    pub lasso_mse: f64,
    pub lasso_converged: bool,
}

pub fn linear_baselines(
    train: &WindowedDataset,
    test: &WindowedDataset,
    reg_ridge: f64,
    reg_lasso: f64,
) -> Result<LinearBaselineResult> {
    let ridge = readout::fit_eval(
        ReadoutKind::Ridge,
        &train.inputs,
        &train.targets,
        &test.inputs,
        &test.targets,
        reg_ridge,
    )?;
    let lasso = readout::fit_eval(
        ReadoutKind::Lasso,
        &train.inputs,
        &train.targets,
        &test.inputs,
        &test.targets,
        reg_lasso,
    )?;
    Ok(LinearBaselineResult {
        ridge_mse: ridge.test_mse,
        lasso_mse: lasso.test_mse,
        lasso_converged: lasso.model.converged,
    })
}
