//! Computational-basis measurement distributions.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::quantum::qubit_mask;

/// Probability over the `2^n` computational basis states, indexed in
/// lexicographic (big-endian) bitstring order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist {
    n_qubits: usize,
    probs: Vec<f64>,
}

impl ProbDist {
    pub fn new(n_qubits: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << n_qubits {
            return Err(CoreError::DimensionMismatch {
                expected: 1 << n_qubits,
                got: probs.len(),
            });
        }
        let p = Self { n_qubits, probs };
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn new_unchecked(n_qubits: usize, probs: Vec<f64>) -> Self {
        Self { n_qubits, probs }
    }

    pub fn validate(&self) -> Result<()> {
        let mut sum = 0.0;
        for &p in &self.probs {
            if !p.is_finite() || p < -1e-9 {
                return Err(CoreError::NonFinite("probability entry"));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidNoise(alloc::format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Pauli-Z expectation per qubit: `z_i = Σ_s p(s)·(−1)^{s_i}`.
    pub fn z_expectations(&self) -> Vec<f64> {
        (0..self.n_qubits)
            .map(|q| {
                let mask = qubit_mask(self.n_qubits, q);
                self.probs
                    .iter()
                    .enumerate()
                    .map(|(s, &p)| if s & mask == 0 { p } else { -p })
                    .sum()
            })
            .collect()
    }

    /// Post-composes the per-qubit symmetric readout confusion map: each bit
    /// flips independently with probability `eps`.
    pub fn with_readout_noise(&self, eps: f64) -> Result<ProbDist> {
        if !(0.0..=0.5).contains(&eps) {
            return Err(CoreError::InvalidNoise(alloc::format!(
                "readout_eps must lie in [0,0.5]: {eps}"
            )));
        }
        let mut probs = self.probs.clone();
        if eps > 0.0 {
            let keep = 1.0 - eps;
            for q in 0..self.n_qubits {
                let mask = qubit_mask(self.n_qubits, q);
                for s in 0..probs.len() {
                    if s & mask == 0 {
                        let a = probs[s];
                        let b = probs[s | mask];
                        probs[s] = keep * a + eps * b;
                        probs[s | mask] = eps * a + keep * b;
                    }
                }
            }
        }
        Ok(ProbDist {
            n_qubits: self.n_qubits,
            probs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn z_expectations_basis_states() {
        // |0...0> -> all +1.
        let mut probs = vec![0.0; 8];
        probs[0] = 1.0;
        let p = ProbDist::new(3, probs).unwrap();
        assert_eq!(p.z_expectations(), vec![1.0, 1.0, 1.0]);

        // |100>: qubit 0 owns the most significant bit.
        let mut probs = vec![0.0; 8];
        probs[0b100] = 1.0;
        let p = ProbDist::new(3, probs).unwrap();
        assert_eq!(p.z_expectations(), vec![-1.0, 1.0, 1.0]);
    }

    #[test]
    fn z_expectations_uniform_is_zero() {
        let p = ProbDist::new(4, vec![1.0 / 16.0; 16]).unwrap();
        for z in p.z_expectations() {
            assert_abs_diff_eq!(z, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn readout_confusion_two_bits() {
        // |10> with eps = 0.1 over (00,01,10,11).
        let p = ProbDist::new(2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let noisy = p.with_readout_noise(0.1).unwrap();
        let expect = [0.09, 0.01, 0.81, 0.09];
        for (got, want) in noisy.probs().iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        assert!(p.with_readout_noise(0.7).is_err());
    }

    #[test]
    fn validate_rejects_bad_distributions() {
        assert!(ProbDist::new(1, vec![0.7, 0.7]).is_err());
        assert!(ProbDist::new(1, vec![1.5, -0.5]).is_err());
        assert!(ProbDist::new(2, vec![0.5, 0.5]).is_err());
    }
}
