//! Per-channel noise strengths attached to gates.

use alloc::format;
// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Gate-attached noise model: depolarizing after every gate (1- or 2-qubit
/// strength by gate arity), amplitude damping per touched qubit driven by the
/// gate duration over `T1`, and a symmetric per-qubit readout bit-flip applied
/// to measured distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Depolarizing probability after each single-qubit gate.
    pub p_depol_1q: f64,
    /// Depolarizing probability (on both qubits) after each two-qubit gate.
    pub p_depol_2q: f64,
    /// Per-qubit symmetric readout flip probability, in `[0, 0.5]`.
    pub readout_eps: f64,
    /// Relaxation time in µs; `None` disables relaxation (T1 = ∞).
    pub t1_us: Option<f64>,
    /// Single-qubit gate duration in µs.
    pub gate_time_1q_us: f64,
    /// Two-qubit gate duration in µs.
    pub gate_time_2q_us: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseSpec {
    /// No-op noise model (identity channels everywhere).
    pub fn none() -> Self {
        Self {
            p_depol_1q: 0.0,
            p_depol_2q: 0.0,
            readout_eps: 0.0,
            t1_us: None,
            gate_time_1q_us: 0.05,
            gate_time_2q_us: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in01 = |v: f64| (0.0..=1.0).contains(&v);
        if !in01(self.p_depol_1q) || !in01(self.p_depol_2q) {
            return Err(CoreError::InvalidNoise(format!(
                "depolarizing probabilities must lie in [0,1]: p1={}, p2={}",
                self.p_depol_1q, self.p_depol_2q
            )));
        }
        if !(0.0..=0.5).contains(&self.readout_eps) {
            return Err(CoreError::InvalidNoise(format!(
                "readout_eps must lie in [0,0.5]: {}",
                self.readout_eps
            )));
        }
        if let Some(t1) = self.t1_us {
            if !(t1 > 0.0) {
                return Err(CoreError::InvalidNoise(format!("t1 must be positive: {t1}")));
            }
        }
        if self.gate_time_1q_us < 0.0 || self.gate_time_2q_us < 0.0 {
            return Err(CoreError::InvalidNoise("gate times must be >= 0".into()));
        }
        Ok(())
    }

    fn gamma(&self, gate_time: f64) -> f64 {
        match self.t1_us {
            None => 0.0,
            Some(t1) => 1.0 - (-gate_time / t1).exp(),
        }
    }

    /// Damping strength per qubit after a single-qubit gate.
    pub fn gamma_1q(&self) -> f64 {
        self.gamma(self.gate_time_1q_us)
    }

    /// Damping strength per qubit after a two-qubit gate.
    pub fn gamma_2q(&self) -> f64 {
        self.gamma(self.gate_time_2q_us)
    }

    /// True when every channel is the identity (readout included).
    pub fn is_trivial(&self) -> bool {
        self.p_depol_1q == 0.0
            && self.p_depol_2q == 0.0
            && self.readout_eps == 0.0
            && self.gamma_1q() == 0.0
            && self.gamma_2q() == 0.0
    }

    /// True when the state evolution is noiseless (readout flips may remain).
    pub fn evolution_is_pure(&self) -> bool {
        self.p_depol_1q == 0.0
            && self.p_depol_2q == 0.0
            && self.gamma_1q() == 0.0
            && self.gamma_2q() == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_from_t1() {
        let n = NoiseSpec {
            t1_us: Some(100.0),
            ..NoiseSpec::none()
        };
        let expected = 1.0 - (-0.05f64 / 100.0).exp();
        assert!((n.gamma_1q() - expected).abs() < 1e-15);
        assert_eq!(NoiseSpec::none().gamma_2q(), 0.0);
    }

    #[test]
    fn validation() {
        let mut n = NoiseSpec::none();
        n.readout_eps = 0.6;
        assert!(n.validate().is_err());
        n.readout_eps = 0.0;
        n.p_depol_2q = 1.5;
        assert!(n.validate().is_err());
        n.p_depol_2q = 1.0;
        assert!(n.validate().is_ok());
        n.t1_us = Some(0.0);
        assert!(n.validate().is_err());
    }
}
