//! Minimal multilayer perceptron: one tanh hidden layer, linear output,
//! full-batch gradient descent on MSE. Deterministic under its seed.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;
use rand::distributions::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::mackey_glass::WindowedDataset;
use crate::readout::{mse, Metrics};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_units: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_units: 64,
            epochs: 2000,
            learning_rate: 1e-2,
            seed: 1,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 || self.learning_rate <= 0.0 {
            return Err(CoreError::InvalidConfig(
                "hidden_units and learning_rate must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Network parameters. Hidden weights start at scaled uniform values; the
/// output layer starts at zero, so the initial prediction is identically 0.
pub struct Mlp {
    pub w1: Vec<f64>, // hidden x input, row-major
    pub b1: Vec<f64>,
    pub w2: Vec<f64>, // output weights, one per hidden unit
    pub b2: f64,
    pub input_dim: usize,
    pub hidden: usize,
}

impl Mlp {
    pub fn init(cfg: &MlpConfig, input_dim: usize) -> Result<Self> {
        cfg.validate()?;
        let mut rng = rng_from_seed(cfg.seed);
        let bound = 1.0 / (input_dim as f64).sqrt();
        let dist = Uniform::from(-bound..bound);
        let w1 = (0..cfg.hidden_units * input_dim)
            .map(|_| dist.sample(&mut rng))
            .collect();
        Ok(Self {
            w1,
            b1: vec![0.0; cfg.hidden_units],
            w2: vec![0.0; cfg.hidden_units],
            b2: 0.0,
            input_dim,
            hidden: cfg.hidden_units,
        })
    }

    pub fn forward(&self, x: &[f64], hidden_out: &mut [f64]) -> f64 {
        for i in 0..self.hidden {
            let mut acc = self.b1[i];
            let row = &self.w1[i * self.input_dim..(i + 1) * self.input_dim];
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            hidden_out[i] = acc.tanh();
        }
        let mut y = self.b2;
        for (w, h) in self.w2.iter().zip(hidden_out.iter()) {
            y += w * h;
        }
        y
    }

    pub fn predict(&self, ds: &WindowedDataset) -> Vec<f64> {
        let mut h = vec![0.0; self.hidden];
        ds.inputs.iter_rows().map(|x| self.forward(x, &mut h)).collect()
    }

    /// Full-batch loss `(1/T)Σ(ŷ−y)²` and parameter gradients.
    pub fn loss_and_gradients(&self, ds: &WindowedDataset) -> (f64, MlpGradients) {
        let t = ds.n_rows() as f64;
        let mut grads = MlpGradients::zeros(self.hidden, self.input_dim);
        let mut h = vec![0.0; self.hidden];
        let mut loss = 0.0;
        for (x, &y) in ds.inputs.iter_rows().zip(&ds.targets) {
            let y_hat = self.forward(x, &mut h);
            let err = y_hat - y;
            loss += err * err;
            let de = 2.0 * err / t;
            grads.b2 += de;
            for i in 0..self.hidden {
                grads.w2[i] += de * h[i];
                let dh = de * self.w2[i] * (1.0 - h[i] * h[i]);
                grads.b1[i] += dh;
                let row = &mut grads.w1[i * self.input_dim..(i + 1) * self.input_dim];
                for (g, v) in row.iter_mut().zip(x) {
                    *g += dh * v;
                }
            }
        }
        (loss / t, grads)
    }

    fn step(&mut self, grads: &MlpGradients, lr: f64) {
        for (w, g) in self.w1.iter_mut().zip(&grads.w1) {
            *w -= lr * g;
        }
        for (b, g) in self.b1.iter_mut().zip(&grads.b1) {
            *b -= lr * g;
        }
        for (w, g) in self.w2.iter_mut().zip(&grads.w2) {
            *w -= lr * g;
        }
        self.b2 -= lr * grads.b2;
    }
}

pub struct MlpGradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpGradients {
    fn zeros(hidden: usize, input_dim: usize) -> Self {
        Self {
            w1: vec![0.0; hidden * input_dim],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        }
    }
}

/// Trains on the train split and reports test MSE.
pub fn mlp_run(cfg: &MlpConfig, train: &WindowedDataset, test: &WindowedDataset) -> Result<Metrics> {
    let mut net = Mlp::init(cfg, train.window_len)?;
    for _ in 0..cfg.epochs {
        let (_, grads) = net.loss_and_gradients(train);
        net.step(&grads, cfg.learning_rate);
    }
    let preds = net.predict(test);
    mse(&test.targets, &preds)
}
