//! The recurrent feedback loop.
//!
//! Each step encodes the current input window into the first half of the
//! circuit and the previous step's scaled feedback into the inverted second
//! half, simulates from `|0…0⟩`, and extracts two readings from the measured
//! distribution: the regression features `r_t` (leading `⌊λ·2^n⌋` basis
//! probabilities) and the next feedback vector — Pauli-Z expectations scaled
//! by `α` in `Expectation` mode, or the leading probabilities scaled by `α`
//! in `FullState` mode.
//!
//! A noiseless step runs on the statevector; a noisy step runs the exact
//! mixed-state path (with a pure-state shortcut when only readout noise is
//! configured, where the two coincide).

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::featuremap::{composite_circuit, FeatureMapSpec};
use crate::mackey_glass::WindowedDataset;
use crate::matrix::Matrix;
use crate::quantum::{CompiledNoisyCircuit, NoiseSpec, PauliState, ProbDist, StateVector};

/// How the fed-back vector is derived from the measured distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedbackMode {
    /// Pauli-Z expectation per qubit (length `n_qubits`), entries in `[−α, α]`.
    Expectation,
    /// Leading basis probabilities (length `n_features`), entries in `[0, α]`.
    FullState,
}

/// Full parameterization of a reservoir run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirConfig {
    pub fmap: FeatureMapSpec,
    pub window_len: usize,
    pub horizon: usize,
    /// Feedback strength in `[0, 1]`.
    pub alpha: f64,
    /// Fraction of basis probabilities kept as features, in `(0, 1]`.
    pub lambda_frac: f64,
    pub feedback_mode: FeedbackMode,
    pub noise: Option<NoiseSpec>,
    /// Starting feedback; empty means all zeros.
    pub initial_feedback: Vec<f64>,
    /// Record the per-step mean single-qubit entanglement entropy
    /// (noiseless runs only).
    pub record_entropy: bool,
    /// Leading reservoir steps dropped from the stored trace.
    pub washout: usize,
}

impl ReservoirConfig {
    pub fn new(fmap: FeatureMapSpec, horizon: usize, alpha: f64, lambda_frac: f64) -> Self {
        Self {
            window_len: fmap.n_features,
            fmap,
            horizon,
            alpha,
            lambda_frac,
            feedback_mode: FeedbackMode::Expectation,
            noise: None,
            initial_feedback: Vec::new(),
            record_entropy: false,
            washout: 0,
        }
    }

    /// Length of the fed-back vector for the configured mode.
    pub fn feedback_len(&self) -> usize {
        match self.feedback_mode {
            FeedbackMode::Expectation => self.fmap.n_qubits(),
            FeedbackMode::FullState => self.fmap.n_features,
        }
    }

    /// Number of feature columns retained: `⌊λ·2^n⌋`.
    pub fn n_kept_features(&self) -> usize {
        let dim = 1usize << self.fmap.n_qubits();
        ((self.lambda_frac * dim as f64).floor() as usize).min(dim)
    }

    pub fn validate(&self) -> Result<()> {
        self.fmap.validate()?;
        if self.window_len != self.fmap.n_features {
            return Err(CoreError::InvalidConfig(
                "window_len must equal the feature map's n_features".to_string(),
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(CoreError::InvalidConfig(
                "alpha must lie in [0, 1]".to_string(),
            ));
        }
        if !(self.lambda_frac > 0.0 && self.lambda_frac <= 1.0) {
            return Err(CoreError::InvalidConfig(
                "lambda_frac must lie in (0, 1]".to_string(),
            ));
        }
        if self.n_kept_features() == 0 {
            return Err(CoreError::InvalidConfig(
                "lambda_frac keeps zero features".to_string(),
            ));
        }
        if !self.initial_feedback.is_empty() && self.initial_feedback.len() != self.feedback_len()
        {
            return Err(CoreError::DimensionMismatch {
                expected: self.feedback_len(),
                got: self.initial_feedback.len(),
            });
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }

    fn initial_feedback_vec(&self) -> Vec<f64> {
        if self.initial_feedback.is_empty() {
            vec![0.0; self.feedback_len()]
        } else {
            self.initial_feedback.clone()
        }
    }
}

/// Everything recorded over one reservoir run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirTrace {
    /// One row per step: the retained `r_t` probabilities.
    pub features: Matrix,
    pub targets: Vec<f64>,
    /// One row per step: the feedback vector produced by that step.
    pub feedback_history: Matrix,
    pub per_step_entropy: Option<Vec<f64>>,
    /// Circuit simulations performed (one per stored or washed-out step).
    pub simulations: usize,
}

impl ReservoirTrace {
    pub fn n_rows(&self) -> usize {
        self.features.rows()
    }
}

/// One step of the loop: simulate the composite circuit for this window and
/// the previous feedback, returning `(r_t, z_next, p_t)`.
pub fn reservoir_step(
    cfg: &ReservoirConfig,
    x_window: &[f64],
    z_prev: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, ProbDist)> {
    if x_window.len() != cfg.window_len {
        return Err(CoreError::DimensionMismatch {
            expected: cfg.window_len,
            got: x_window.len(),
        });
    }
    if z_prev.len() != cfg.feedback_len() {
        return Err(CoreError::DimensionMismatch {
            expected: cfg.feedback_len(),
            got: z_prev.len(),
        });
    }
    let circuit = composite_circuit(&cfg.fmap, x_window, z_prev)?;
    let p = simulate_probabilities(cfg, &circuit)?;
    Ok(post_process(cfg, p))
}

fn simulate_probabilities(
    cfg: &ReservoirConfig,
    circuit: &crate::quantum::Circuit,
) -> Result<ProbDist> {
    let n = cfg.fmap.n_qubits();
    match &cfg.noise {
        None => {
            let mut sv = StateVector::ground(n);
            sv.apply_circuit(circuit)?;
            Ok(sv.probabilities())
        }
        Some(noise) if noise.evolution_is_pure() => {
            let mut sv = StateVector::ground(n);
            sv.apply_circuit(circuit)?;
            sv.probabilities().with_readout_noise(noise.readout_eps)
        }
        Some(noise) => {
            let compiled = CompiledNoisyCircuit::compile(circuit, noise)?;
            let mut state = PauliState::ground(n);
            state.apply_compiled(&compiled)?;
            state.probabilities().with_readout_noise(noise.readout_eps)
        }
    }
}

fn post_process(cfg: &ReservoirConfig, p: ProbDist) -> (Vec<f64>, Vec<f64>, ProbDist) {
    let kept = cfg.n_kept_features();
    let r: Vec<f64> = p.probs()[..kept].to_vec();
    let z_next: Vec<f64> = match cfg.feedback_mode {
        FeedbackMode::Expectation => p
            .z_expectations()
            .into_iter()
            .map(|z| cfg.alpha * z)
            .collect(),
        FeedbackMode::FullState => p.probs()[..cfg.fmap.n_features]
            .iter()
            .map(|&v| cfg.alpha * v)
            .collect(),
    };
    (r, z_next, p)
}

/// Runs the loop over every dataset row in order, threading the feedback.
pub fn run_reservoir(cfg: &ReservoirConfig, ds: &WindowedDataset) -> Result<ReservoirTrace> {
    cfg.validate()?;
    if ds.window_len != cfg.window_len {
        return Err(CoreError::DimensionMismatch {
            expected: cfg.window_len,
            got: ds.window_len,
        });
    }
    let n_rows = ds.n_rows();
    if cfg.washout >= n_rows {
        return Err(CoreError::InvalidConfig(
            "washout consumes the whole dataset".to_string(),
        ));
    }
    let record_entropy = cfg.record_entropy && cfg.noise.is_none();
    let kept = cfg.n_kept_features();
    let stored = n_rows - cfg.washout;

    let mut features = Matrix::zeros(stored, kept);
    let mut feedback_history = Matrix::zeros(stored, cfg.feedback_len());
    let mut targets = Vec::with_capacity(stored);
    let mut entropies = if record_entropy {
        Some(Vec::with_capacity(stored))
    } else {
        None
    };

    let mut z = cfg.initial_feedback_vec();
    let mut simulations = 0usize;
    for row in 0..n_rows {
        let x_window = ds.inputs.row(row);
        let (r, z_next, _p) = if record_entropy {
            // Entropy needs the pure state itself, not just probabilities.
            let circuit = composite_circuit(&cfg.fmap, x_window, &z)?;
            let mut sv = StateVector::ground(cfg.fmap.n_qubits());
            sv.apply_circuit(&circuit)?;
            let entropy = sv.entanglement_entropy_avg()?;
            if row >= cfg.washout {
                entropies.as_mut().expect("recording").push(entropy);
            }
            post_process(cfg, sv.probabilities())
        } else {
            reservoir_step(cfg, x_window, &z)?
        };
        simulations += 1;
        if row >= cfg.washout {
            let out = row - cfg.washout;
            features.row_mut(out).copy_from_slice(&r);
            feedback_history.row_mut(out).copy_from_slice(&z_next);
            targets.push(ds.targets[row]);
        }
        z = z_next;
    }

    Ok(ReservoirTrace {
        features,
        targets,
        feedback_history,
        per_step_entropy: entropies,
        simulations,
    })
}

/// Distance series between two feedback trajectories driven by identical
/// inputs from different initial feedbacks. Index 0 is the initial distance.
pub fn esp_distance_series(
    cfg: &ReservoirConfig,
    ds: &WindowedDataset,
    init_a: &[f64],
    init_b: &[f64],
) -> Result<Vec<f64>> {
    let flen = cfg.feedback_len();
    if init_a.len() != flen || init_b.len() != flen {
        return Err(CoreError::DimensionMismatch {
            expected: flen,
            got: init_a.len().max(init_b.len()),
        });
    }
    let mut cfg_a = cfg.clone();
    cfg_a.initial_feedback = init_a.to_vec();
    cfg_a.validate()?;

    let euclid = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };

    let mut distances = Vec::with_capacity(ds.n_rows() + 1);
    distances.push(euclid(init_a, init_b));
    let mut za = init_a.to_vec();
    let mut zb = init_b.to_vec();
    for row in 0..ds.n_rows() {
        let x_window = ds.inputs.row(row);
        let (_, za_next, _) = reservoir_step(cfg, x_window, &za)?;
        let (_, zb_next, _) = reservoir_step(cfg, x_window, &zb)?;
        za = za_next;
        zb = zb_next;
        distances.push(euclid(&za, &zb));
    }
    Ok(distances)
}
