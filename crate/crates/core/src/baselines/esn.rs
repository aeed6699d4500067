//! Echo state network with leaky-tanh units and a ridge readout on the
//! concatenated state-and-input vector.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;
use rand::distributions::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::mackey_glass::WindowedDataset;
use crate::matrix::Matrix;
use crate::readout::{self, Metrics, ReadoutKind};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsnConfig {
    pub n_reservoir: usize,
    pub spectral_radius: f64,
    pub input_scaling: f64,
    /// Leak rate `a` in `(0, 1]`: `h ← (1−a)h + a·tanh(…)`.
    pub leak_rate: f64,
    pub reg: f64,
    /// Output-feedback coupling strength (0 disables feedback).
    pub feedback_scaling: f64,
    pub seed: u64,
    /// Leading state-update steps excluded from readout training.
    pub washout: usize,
}

impl Default for EsnConfig {
    fn default() -> Self {
        Self {
            n_reservoir: 200,
            spectral_radius: 0.9,
            input_scaling: 0.5,
            leak_rate: 0.3,
            reg: 1e-5,
            feedback_scaling: 0.0,
            seed: 1,
            washout: 100,
        }
    }
}

impl EsnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_reservoir == 0 {
            return Err(CoreError::InvalidConfig("n_reservoir must be >= 1".to_string()));
        }
        if !(self.leak_rate > 0.0 && self.leak_rate <= 1.0) {
            return Err(CoreError::InvalidConfig("leak_rate must lie in (0,1]".to_string()));
        }
        if self.spectral_radius < 0.0 || self.input_scaling <= 0.0 || self.reg < 0.0 {
            return Err(CoreError::InvalidConfig(
                "spectral_radius >= 0, input_scaling > 0, reg >= 0 required".to_string(),
            ));
        }
        Ok(())
    }
}

/// Largest eigenvalue magnitude of a dense real matrix.
pub fn spectral_radius(w: &DMatrix<f64>) -> f64 {
    w.complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

struct EsnMachine {
    w_res: DMatrix<f64>,
    w_in: DMatrix<f64>,
    w_fb: Vec<f64>,
    leak: f64,
}

impl EsnMachine {
    fn build(cfg: &EsnConfig, input_dim: usize) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n_reservoir;
        let mut rng = rng_from_seed(cfg.seed);
        let unit = Uniform::from(-1.0f64..1.0);

        let mut w_res = DMatrix::<f64>::zeros(n, n);
        for v in w_res.iter_mut() {
            *v = unit.sample(&mut rng);
        }
        if cfg.spectral_radius == 0.0 {
            w_res.fill(0.0);
        } else {
            let rho = spectral_radius(&w_res);
            if rho <= 0.0 {
                return Err(CoreError::SolveFailed(
                    "cannot rescale a zero-spectrum reservoir matrix".to_string(),
                ));
            }
            w_res *= cfg.spectral_radius / rho;
        }

        let mut w_in = DMatrix::<f64>::zeros(n, input_dim);
        for v in w_in.iter_mut() {
            *v = cfg.input_scaling * unit.sample(&mut rng);
        }
        let w_fb: Vec<f64> = (0..n)
            .map(|_| cfg.feedback_scaling * unit.sample(&mut rng))
            .collect();

        Ok(Self {
            w_res,
            w_in,
            w_fb,
            leak: cfg.leak_rate,
        })
    }

    fn update(&self, h: &mut [f64], x: &[f64], y_prev: f64) {
        let n = h.len();
        let mut pre = vec![0.0f64; n];
        for (i, row) in self.w_res.row_iter().enumerate() {
            let mut acc = 0.0;
            for (j, w) in row.iter().enumerate() {
                acc += w * h[j];
            }
            pre[i] = acc;
        }
        for (i, row) in self.w_in.row_iter().enumerate() {
            let mut acc = 0.0;
            for (j, w) in row.iter().enumerate() {
                acc += w * x[j];
            }
            pre[i] += acc + self.w_fb[i] * y_prev;
        }
        for i in 0..n {
            h[i] = (1.0 - self.leak) * h[i] + self.leak * pre[i].tanh();
        }
    }
}

/// Runs the ESN on a chronological train/test pair and reports test MSE.
///
/// Readout features are `[h_t; x_t]`. Training uses teacher targets in the
/// feedback slot; the test phase feeds back its own predictions.
pub fn esn_run(cfg: &EsnConfig, train: &WindowedDataset, test: &WindowedDataset) -> Result<Metrics> {
    let input_dim = train.window_len;
    let machine = EsnMachine::build(cfg, input_dim)?;
    let n = cfg.n_reservoir;
    if cfg.washout >= train.n_rows() {
        return Err(CoreError::InvalidConfig(
            "ESN washout consumes the whole training set".to_string(),
        ));
    }

    let mut h = vec![0.0f64; n];
    let mut feats = Matrix::zeros(train.n_rows() - cfg.washout, n + input_dim);
    let mut y_prev = 0.0;
    for t in 0..train.n_rows() {
        let x = train.inputs.row(t);
        machine.update(&mut h, x, y_prev);
        if t >= cfg.washout {
            let row = feats.row_mut(t - cfg.washout);
            row[..n].copy_from_slice(&h);
            row[n..].copy_from_slice(x);
        }
        y_prev = train.targets[t];
    }
    let model = readout::fit(
        ReadoutKind::Ridge,
        &feats,
        &train.targets[cfg.washout..],
        cfg.reg,
    )?;

    // Warm state carries over; predictions feed the feedback slot.
    let mut preds = Vec::with_capacity(test.n_rows());
    let mut row = vec![0.0f64; n + input_dim];
    for t in 0..test.n_rows() {
        let x = test.inputs.row(t);
        machine.update(&mut h, x, y_prev);
        row[..n].copy_from_slice(&h);
        row[n..].copy_from_slice(x);
        let y_hat = model.predict_row(&row);
        preds.push(y_hat);
        y_prev = y_hat;
    }
    readout::mse(&test.targets, &preds)
}

/// Exhaustive grid over `(spectral_radius, input_scaling, reg)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsnGrid {
    pub spectral_radius: Vec<f64>,
    pub input_scaling: Vec<f64>,
    pub reg: Vec<f64>,
}

impl Default for EsnGrid {
    fn default() -> Self {
        Self {
            spectral_radius: vec![0.7, 0.9, 1.1],
            input_scaling: vec![0.1, 0.5, 1.0],
            reg: vec![1e-8, 1e-5, 1e-2],
        }
    }
}

/// Evaluates every grid cell and returns the argmin-MSE configuration.
/// Ties break toward smaller spectral radius, then smaller regularization.
pub fn esn_grid_search(
    base: &EsnConfig,
    grid: &EsnGrid,
    train: &WindowedDataset,
    test: &WindowedDataset,
) -> Result<(EsnConfig, Metrics)> {
    if grid.spectral_radius.is_empty() || grid.input_scaling.is_empty() || grid.reg.is_empty() {
        return Err(CoreError::InvalidConfig("empty ESN grid".to_string()));
    }
    let mut best: Option<(EsnConfig, Metrics)> = None;
    for &sr in &grid.spectral_radius {
        for &is in &grid.input_scaling {
            for &reg in &grid.reg {
                let cfg = EsnConfig {
                    spectral_radius: sr,
                    input_scaling: is,
                    reg,
                    ..*base
                };
                let metrics = esn_run(&cfg, train, test)?;
                let better = match &best {
                    None => true,
                    Some((bc, bm)) => {
                        metrics.mse < bm.mse
                            || (metrics.mse == bm.mse
                                && (sr < bc.spectral_radius
                                    || (sr == bc.spectral_radius && reg < bc.reg)))
                    }
                };
                if better {
                    best = Some((cfg, metrics));
                }
            }
        }
    }
    Ok(best.expect("non-empty grid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mackey_glass::{make_windows, split_train_test};
    use approx::assert_abs_diff_eq;

    fn dataset() -> (WindowedDataset, WindowedDataset) {
        let series: Vec<f64> = (0..400)
            .map(|i| 0.5 + 0.3 * ((i as f64) * 0.21).sin() + 0.15 * ((i as f64) * 0.043).cos())
            .collect();
        let ds = make_windows(&series, 5, 1).unwrap();
        split_train_test(&ds, 300).unwrap()
    }

    #[test]
    fn spectral_rescaling_is_exact() {
        let cfg = EsnConfig {
            n_reservoir: 60,
            spectral_radius: 0.85,
            ..EsnConfig::default()
        };
        let machine = EsnMachine::build(&cfg, 3).unwrap();
        let rho = spectral_radius(&machine.w_res);
        assert_abs_diff_eq!(rho, 0.85, epsilon = 1e-8);
    }

    #[test]
    fn zero_radius_matches_static_random_features() {
        // With W_res = 0, W_fb = 0, and leak 1 the ESN is a static regression
        // on tanh(W_in x); build that model explicitly and compare.
        let (train, test) = dataset();
        let cfg = EsnConfig {
            n_reservoir: 50,
            spectral_radius: 0.0,
            leak_rate: 1.0,
            feedback_scaling: 0.0,
            washout: 0,
            reg: 1e-8,
            seed: 42,
            ..EsnConfig::default()
        };
        let esn_mse = esn_run(&cfg, &train, &test).unwrap().mse;

        let machine = EsnMachine::build(&cfg, train.window_len).unwrap();
        let explicit = |ds: &WindowedDataset| {
            let mut m = Matrix::zeros(ds.n_rows(), cfg.n_reservoir + ds.window_len);
            for t in 0..ds.n_rows() {
                let x = ds.inputs.row(t);
                let row = m.row_mut(t);
                for i in 0..cfg.n_reservoir {
                    let mut acc = 0.0;
                    for (j, &v) in x.iter().enumerate() {
                        acc += machine.w_in[(i, j)] * v;
                    }
                    row[i] = acc.tanh();
                }
                row[cfg.n_reservoir..].copy_from_slice(x);
            }
            m
        };
        let train_feats = explicit(&train);
        let test_feats = explicit(&test);
        let fe = readout::fit_eval(
            ReadoutKind::Ridge,
            &train_feats,
            &train.targets,
            &test_feats,
            &test.targets,
            cfg.reg,
        )
        .unwrap();
        assert_abs_diff_eq!(esn_mse, fe.test_mse, epsilon = 1e-12 * (1.0 + fe.test_mse));
    }

    #[test]
    fn identical_seeds_identical_mse() {
        let (train, test) = dataset();
        let cfg = EsnConfig {
            n_reservoir: 40,
            seed: 7,
            ..EsnConfig::default()
        };
        let a = esn_run(&cfg, &train, &test).unwrap().mse;
        let b = esn_run(&cfg, &train, &test).unwrap().mse;
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn echo_state_contraction() {
        // Two state trajectories from different initializations contract
        // under identical inputs at sub-unit spectral radius.
        let cfg = EsnConfig {
            n_reservoir: 80,
            spectral_radius: 0.95,
            leak_rate: 0.5,
            seed: 3,
            ..EsnConfig::default()
        };
        let machine = EsnMachine::build(&cfg, 2).unwrap();
        let mut ha = vec![0.9f64; 80];
        let mut hb = vec![-0.9f64; 80];
        let mut rng = rng_from_seed(99);
        let unit = Uniform::from(0.0f64..1.0);
        let mut converged_at = None;
        for t in 0..500 {
            let x = [unit.sample(&mut rng), unit.sample(&mut rng)];
            machine.update(&mut ha, &x, 0.0);
            machine.update(&mut hb, &x, 0.0);
            let dist: f64 = ha
                .iter()
                .zip(&hb)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist < 1e-6 {
                converged_at = Some(t);
                break;
            }
        }
        assert!(converged_at.is_some(), "no contraction within 500 steps");
    }

    #[test]
    fn grid_search_examples() {
        let (train, test) = dataset();
        let base = EsnConfig {
            n_reservoir: 30,
            washout: 20,
            seed: 5,
            ..EsnConfig::default()
        };
        // Single cell returns that cell.
        let single = EsnGrid {
            spectral_radius: vec![0.8],
            input_scaling: vec![0.4],
            reg: vec![1e-6],
        };
        let (cfg, _) = esn_grid_search(&base, &single, &train, &test).unwrap();
        assert_eq!(cfg.spectral_radius, 0.8);
        assert_eq!(cfg.input_scaling, 0.4);
        assert_eq!(cfg.reg, 1e-6);

        // Duplicated best cell: deterministic tie-break toward smaller radius.
        let dup = EsnGrid {
            spectral_radius: vec![0.8, 0.8],
            input_scaling: vec![0.4],
            reg: vec![1e-6],
        };
        let (cfg2, m2) = esn_grid_search(&base, &dup, &train, &test).unwrap();
        assert_eq!(cfg2.spectral_radius, 0.8);
        assert_eq!(m2.mse, esn_run(&cfg, &train, &test).unwrap().mse);

        // Argmin matches brute-force re-evaluation.
        let grid = EsnGrid {
            spectral_radius: vec![0.6, 0.9],
            input_scaling: vec![0.2, 0.8],
            reg: vec![1e-7, 1e-3],
        };
        let (best_cfg, best_m) = esn_grid_search(&base, &grid, &train, &test).unwrap();
        let mut brute = f64::INFINITY;
        for &sr in &grid.spectral_radius {
            for &is in &grid.input_scaling {
                for &reg in &grid.reg {
                    let c = EsnConfig {
                        spectral_radius: sr,
                        input_scaling: is,
                        reg,
                        ..base
                    };
                    brute = brute.min(esn_run(&c, &train, &test).unwrap().mse);
                }
            }
        }
        assert_eq!(best_m.mse, brute);
        let _ = best_cfg;
    }
}
