//! Dense pure-state simulation.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::quantum::density::DensityMatrix;
use crate::quantum::gate::{Circuit, Gate};
use crate::quantum::prob::ProbDist;
use crate::quantum::qubit_mask;

/// Pure state over `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state `|0…0⟩`.
    pub fn ground(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(CoreError::DimensionMismatch {
                expected: 1 << n_qubits,
                got: amps.len(),
            });
        }
        let sv = Self { n_qubits, amps };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(CoreError::NonFinite("state norm"));
        }
        Ok(sv)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn apply_1q(&mut self, q: usize, u: &[[Complex64; 2]; 2]) {
        let mask = qubit_mask(self.n_qubits, q);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for low in base..base + mask {
                let a = self.amps[low];
                let b = self.amps[low | mask];
                self.amps[low] = u[0][0] * a + u[0][1] * b;
                self.amps[low | mask] = u[1][0] * a + u[1][1] * b;
            }
            base += 2 * mask;
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let (a, b) = gate.support();
        let hi = b.map_or(a, |b| a.max(b));
        if hi >= self.n_qubits {
            return Err(CoreError::QubitOutOfRange {
                qubit: hi,
                n_qubits: self.n_qubits,
            });
        }
        match *gate {
            Gate::Rz { q, angle } | Gate::Phase { q, angle } => {
                // Diagonal gates: one multiply per amplitude.
                let (d0, d1) = match gate {
                    Gate::Rz { .. } => (
                        Complex64::from_polar(1.0, -angle / 2.0),
                        Complex64::from_polar(1.0, angle / 2.0),
                    ),
                    _ => (Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, angle)),
                };
                let mask = qubit_mask(self.n_qubits, q);
                for (s, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if s & mask == 0 { d0 } else { d1 };
                }
            }
            Gate::Cnot { control, target } => {
                let mc = qubit_mask(self.n_qubits, control);
                let mt = qubit_mask(self.n_qubits, target);
                for s in 0..self.amps.len() {
                    if s & mc != 0 && s & mt == 0 {
                        self.amps.swap(s, s | mt);
                    }
                }
            }
            Gate::Cz { a, b } => {
                let ma = qubit_mask(self.n_qubits, a);
                let mb = qubit_mask(self.n_qubits, b);
                for (s, amp) in self.amps.iter_mut().enumerate() {
                    if s & ma != 0 && s & mb != 0 {
                        *amp = -*amp;
                    }
                }
            }
            _ => {
                let u = gate.unitary_1q().expect("1q gate");
                self.apply_1q(a, &u);
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(CoreError::QubitCountMismatch {
                got: circuit.n_qubits(),
                expected: self.n_qubits,
            });
        }
        for g in circuit.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn probabilities(&self) -> ProbDist {
        ProbDist::new_unchecked(
            self.n_qubits,
            self.amps.iter().map(Complex64::norm_sqr).collect(),
        )
    }

    /// Partial trace down to `qubit`: the 2×2 reduced state.
    pub fn reduced_single_qubit(&self, qubit: usize) -> Result<DensityMatrix> {
        if qubit >= self.n_qubits {
            return Err(CoreError::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        let mask = qubit_mask(self.n_qubits, qubit);
        let mut r00 = 0.0;
        let mut r11 = 0.0;
        let mut r01 = Complex64::new(0.0, 0.0);
        for s in 0..self.amps.len() {
            if s & mask == 0 {
                let a = self.amps[s];
                let b = self.amps[s | mask];
                r00 += a.norm_sqr();
                r11 += b.norm_sqr();
                r01 += a * b.conj();
            }
        }
        DensityMatrix::from_entries(
            1,
            vec![
                Complex64::new(r00, 0.0),
                r01,
                r01.conj(),
                Complex64::new(r11, 0.0),
            ],
        )
    }

    /// Mean over qubits of the von Neumann entropy (base 2) of each
    /// single-qubit reduced state. Lies in `[0, 1]` bits for pure states.
    pub fn entanglement_entropy_avg(&self) -> Result<f64> {
        let mut total = 0.0;
        for q in 0..self.n_qubits {
            let rho = self.reduced_single_qubit(q)?;
            total += rho.binary_entropy_bits();
        }
        Ok(total / self.n_qubits as f64)
    }
}

/// Binary Shannon entropy in bits with the `0·log 0 := 0` convention.
pub(crate) fn binary_entropy(lambda: f64) -> f64 {
    let l = lambda.clamp(0.0, 1.0);
    let mut s = 0.0;
    if l > 0.0 {
        s -= l * l.log2();
    }
    if l < 1.0 {
        s -= (1.0 - l) * (1.0 - l).log2();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hadamard_on_ground() {
        let mut sv = StateVector::ground(1);
        sv.apply_gate(&Gate::H { q: 0 }).unwrap();
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(sv.amps[0].re, inv_sqrt2, epsilon = 1e-15);
        assert_abs_diff_eq!(sv.amps[1].re, inv_sqrt2, epsilon = 1e-15);
    }

    #[test]
    fn h_z_h_is_x() {
        // Oracle: the explicit 2x2 product H·P(pi)·H equals X.
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let hm = [[h, h], [h, -h]];
        let zm = [[1.0, 0.0], [0.0, -1.0]];
        let mut prod = [[0.0f64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        prod[i][j] += hm[i][k] * zm[k][l] * hm[l][j];
                    }
                }
            }
        }
        assert_abs_diff_eq!(prod[0][1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(prod[1][0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(prod[0][0], 0.0, epsilon = 1e-15);

        let mut sv = StateVector::ground(1);
        for g in [
            Gate::H { q: 0 },
            Gate::Phase {
                q: 0,
                angle: core::f64::consts::PI,
            },
            Gate::H { q: 0 },
        ] {
            sv.apply_gate(&g).unwrap();
        }
        assert_abs_diff_eq!(sv.amps[1].norm(), 1.0, epsilon = 1e-12);
        assert!(sv.amps[0].norm() < 1e-12);
    }

    #[test]
    fn bell_state_preparation() {
        let mut sv = StateVector::ground(2);
        sv.apply_gate(&Gate::H { q: 0 }).unwrap();
        sv.apply_gate(&Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        let p = sv.probabilities();
        assert_abs_diff_eq!(p.probs()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.probs()[3], 0.5, epsilon = 1e-12);
        assert!(p.probs()[1].abs() < 1e-15 && p.probs()[2].abs() < 1e-15);

        // Either reduced state of a Bell pair is I/2, entropy 1 bit.
        assert_abs_diff_eq!(sv.entanglement_entropy_avg().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn reduced_state_of_product_state() {
        // |0> ⊗ |+>, qubit 1 -> |+><+|.
        let mut sv = StateVector::ground(2);
        sv.apply_gate(&Gate::H { q: 1 }).unwrap();
        let rho = sv.reduced_single_qubit(1).unwrap();
        for (i, want) in [0.5, 0.5, 0.5, 0.5].iter().enumerate() {
            assert_abs_diff_eq!(rho.entries()[i].re, *want, epsilon = 1e-12);
            assert_abs_diff_eq!(rho.entries()[i].im, 0.0, epsilon = 1e-12);
        }
        assert!(sv.reduced_single_qubit(2).is_err());
    }

    #[test]
    fn ghz_entropy_is_one_bit() {
        let mut sv = StateVector::ground(3);
        sv.apply_gate(&Gate::H { q: 0 }).unwrap();
        sv.apply_gate(&Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        sv.apply_gate(&Gate::Cnot {
            control: 1,
            target: 2,
        })
        .unwrap();
        // Diagonal-marginal check: each single-qubit marginal is I/2.
        for q in 0..3 {
            let rho = sv.reduced_single_qubit(q).unwrap();
            assert_abs_diff_eq!(rho.entries()[0].re, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(rho.entries()[3].re, 0.5, epsilon = 1e-12);
            assert!(rho.entries()[1].norm() < 1e-12);
        }
        assert_abs_diff_eq!(sv.entanglement_entropy_avg().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn basis_states_have_zero_entropy() {
        let mut sv = StateVector::ground(3);
        sv.apply_gate(&Gate::Phase { q: 1, angle: 0.7 }).unwrap();
        assert_abs_diff_eq!(sv.entanglement_entropy_avg().unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn qubit_count_mismatch_rejected() {
        let mut sv = StateVector::ground(2);
        let c = Circuit::new(3);
        assert!(sv.apply_circuit(&c).is_err());
    }
}
