//! Dense mixed-state simulation (reference path).
//!
//! Gates act by unitary conjugation; noise channels follow each gate on the
//! touched qubits: depolarizing (arity-matched strength), then amplitude
//! damping with `γ = 1 − exp(−t_gate/T1)` per touched qubit. All channel
//! updates are block-local in the touched qubits' index bits.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::quantum::gate::{Circuit, Gate};
use crate::quantum::noise::NoiseSpec;
use crate::quantum::prob::ProbDist;
use crate::quantum::qubit_mask;
use crate::quantum::statevector::{binary_entropy, StateVector};

/// Mixed state as a dense `2^n × 2^n` complex matrix (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn ground(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, data }
    }

    pub fn from_statevector(sv: &StateVector) -> Self {
        let amps = sv.amplitudes();
        let dim = amps.len();
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(amps[i] * amps[j].conj());
            }
        }
        Self {
            n_qubits: sv.n_qubits(),
            data,
        }
    }

    pub fn from_entries(n_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(CoreError::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { n_qubits, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// Hermiticity check: `max |ρ_{ij} − conj(ρ_{ji})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                let d = (self.data[i * dim + j] - self.data[j * dim + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Left-multiplies by a single-qubit unitary (rows) and right-multiplies
    /// by its adjoint (columns).
    fn conjugate_1q(&mut self, q: usize, u: &[[Complex64; 2]; 2]) {
        let dim = self.dim();
        let mask = qubit_mask(self.n_qubits, q);
        // Rows: rho <- U rho.
        let mut base = 0;
        while base < dim {
            for r0 in base..base + mask {
                let r1 = r0 | mask;
                for j in 0..dim {
                    let a = self.data[r0 * dim + j];
                    let b = self.data[r1 * dim + j];
                    self.data[r0 * dim + j] = u[0][0] * a + u[0][1] * b;
                    self.data[r1 * dim + j] = u[1][0] * a + u[1][1] * b;
                }
            }
            base += 2 * mask;
        }
        // Columns: rho <- rho U†.
        for i in 0..dim {
            let row = &mut self.data[i * dim..(i + 1) * dim];
            let mut base = 0;
            while base < dim {
                for c0 in base..base + mask {
                    let c1 = c0 | mask;
                    let a = row[c0];
                    let b = row[c1];
                    row[c0] = a * u[0][0].conj() + b * u[0][1].conj();
                    row[c1] = a * u[1][0].conj() + b * u[1][1].conj();
                }
                base += 2 * mask;
            }
        }
    }

    /// Applies one gate as a unitary conjugation (no noise).
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let (a, b) = gate.support();
        let hi = b.map_or(a, |b| a.max(b));
        if hi >= self.n_qubits {
            return Err(CoreError::QubitOutOfRange {
                qubit: hi,
                n_qubits: self.n_qubits,
            });
        }
        let dim = self.dim();
        match *gate {
            Gate::Cnot { control, target } => {
                let mc = qubit_mask(self.n_qubits, control);
                let mt = qubit_mask(self.n_qubits, target);
                // Permutation: swap rows, then columns.
                for r in 0..dim {
                    if r & mc != 0 && r & mt == 0 {
                        let r2 = r | mt;
                        for j in 0..dim {
                            self.data.swap(r * dim + j, r2 * dim + j);
                        }
                    }
                }
                for i in 0..dim {
                    let row = &mut self.data[i * dim..(i + 1) * dim];
                    for c in 0..dim {
                        if c & mc != 0 && c & mt == 0 {
                            row.swap(c, c | mt);
                        }
                    }
                }
            }
            Gate::Cz { a, b } => {
                let ma = qubit_mask(self.n_qubits, a);
                let mb = qubit_mask(self.n_qubits, b);
                let sign = |s: usize| s & ma != 0 && s & mb != 0;
                for i in 0..dim {
                    for j in 0..dim {
                        if sign(i) != sign(j) {
                            self.data[i * dim + j] = -self.data[i * dim + j];
                        }
                    }
                }
            }
            _ => {
                let u = gate.unitary_1q().expect("1q gate");
                self.conjugate_1q(a, &u);
            }
        }
        Ok(())
    }

    /// Single-qubit depolarizing: `ρ → (1−p)ρ + p·(I/2 ⊗ Tr_q ρ)`.
    pub fn depolarize_1q(&mut self, q: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let dim = self.dim();
        let mask = qubit_mask(self.n_qubits, q);
        let keep = 1.0 - p;
        for r in 0..dim {
            if r & mask != 0 {
                continue;
            }
            for c in 0..dim {
                if c & mask != 0 {
                    continue;
                }
                let i00 = r * dim + c;
                let i01 = r * dim + (c | mask);
                let i10 = (r | mask) * dim + c;
                let i11 = (r | mask) * dim + (c | mask);
                let tr_half = (self.data[i00] + self.data[i11]) * 0.5;
                self.data[i00] = keep * self.data[i00] + p * tr_half;
                self.data[i11] = keep * self.data[i11] + p * tr_half;
                self.data[i01] *= keep;
                self.data[i10] *= keep;
            }
        }
    }

    /// Two-qubit depolarizing on the pair: `ρ → (1−p)ρ + p·(I/4 ⊗ Tr_{ab} ρ)`.
    pub fn depolarize_2q(&mut self, qa: usize, qb: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let dim = self.dim();
        let ma = qubit_mask(self.n_qubits, qa);
        let mb = qubit_mask(self.n_qubits, qb);
        let keep = 1.0 - p;
        let offs = [0, mb, ma, ma | mb];
        for r in 0..dim {
            if r & (ma | mb) != 0 {
                continue;
            }
            for c in 0..dim {
                if c & (ma | mb) != 0 {
                    continue;
                }
                let mut tr = Complex64::new(0.0, 0.0);
                for &o in &offs {
                    tr += self.data[(r | o) * dim + (c | o)];
                }
                let mix = tr * 0.25;
                for &or in &offs {
                    for &oc in &offs {
                        let idx = (r | or) * dim + (c | oc);
                        self.data[idx] *= keep;
                        if or == oc {
                            self.data[idx] += p * mix;
                        }
                    }
                }
            }
        }
    }

    /// Amplitude damping toward `|0⟩` with strength `gamma` on one qubit.
    pub fn amplitude_damp(&mut self, q: usize, gamma: f64) {
        if gamma == 0.0 {
            return;
        }
        let dim = self.dim();
        let mask = qubit_mask(self.n_qubits, q);
        let s = (1.0 - gamma).sqrt();
        for r in 0..dim {
            if r & mask != 0 {
                continue;
            }
            for c in 0..dim {
                if c & mask != 0 {
                    continue;
                }
                let i00 = r * dim + c;
                let i01 = r * dim + (c | mask);
                let i10 = (r | mask) * dim + c;
                let i11 = (r | mask) * dim + (c | mask);
                let excited = self.data[i11];
                self.data[i00] += gamma * excited;
                self.data[i01] *= s;
                self.data[i10] *= s;
                self.data[i11] *= 1.0 - gamma;
            }
        }
    }

    /// Applies the circuit with gate-attached noise channels.
    pub fn apply_circuit_noisy(&mut self, circuit: &Circuit, noise: &NoiseSpec) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(CoreError::QubitCountMismatch {
                got: circuit.n_qubits(),
                expected: self.n_qubits,
            });
        }
        noise.validate()?;
        let g1 = noise.gamma_1q();
        let g2 = noise.gamma_2q();
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
            let (a, b) = gate.support();
            match b {
                None => {
                    self.depolarize_1q(a, noise.p_depol_1q);
                    self.amplitude_damp(a, g1);
                }
                Some(b) => {
                    self.depolarize_2q(a, b, noise.p_depol_2q);
                    self.amplitude_damp(a, g2);
                    self.amplitude_damp(b, g2);
                }
            }
        }
        Ok(())
    }

    /// Diagonal of the state in the computational basis.
    pub fn probabilities(&self) -> ProbDist {
        let dim = self.dim();
        ProbDist::new_unchecked(
            self.n_qubits,
            (0..dim).map(|i| self.data[i * dim + i].re).collect(),
        )
    }

    /// Von Neumann entropy in bits of a single-qubit state (closed form).
    ///
    /// Panics if called on more than one qubit.
    pub fn binary_entropy_bits(&self) -> f64 {
        assert_eq!(self.n_qubits, 1, "closed form is for 2x2 states");
        let half_tr = 0.5 * (self.data[0].re + self.data[3].re);
        let det = self.data[0].re * self.data[3].re - self.data[1].norm_sqr();
        let disc = (half_tr * half_tr - det).max(0.0).sqrt();
        binary_entropy(half_tr + disc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn one_qubit(entries: [f64; 4]) -> DensityMatrix {
        DensityMatrix::from_entries(
            1,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn full_relaxation_sends_excited_to_ground() {
        let mut rho = one_qubit([0.0, 0.0, 0.0, 1.0]);
        rho.amplitude_damp(0, 1.0);
        assert_eq!(rho.entry(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(rho.entry(1, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn depolarizing_kraus_sum_oracle() {
        // At full strength |+><+| becomes I/2 exactly (p = 1 fully mixes),
        // and in general the channel must match the Kraus sum
        // (1-3p/4)ρ + (p/4)(XρX + YρY + ZρZ).
        let plus = one_qubit([0.5, 0.5, 0.5, 0.5]);
        let mut rho = plus.clone();
        rho.depolarize_1q(0, 1.0);
        assert_abs_diff_eq!(rho.entry(0, 0).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.entry(1, 1).re, 0.5, epsilon = 1e-12);
        assert!(rho.entry(0, 1).norm() < 1e-12);

        // Kraus oracle at p = 0.4, on a non-trivial state.
        let mut rho = one_qubit([0.7, 0.2, 0.2, 0.3]);
        let p = 0.4;
        let kraus_expected = {
            let x = [[0.0, 1.0], [1.0, 0.0]];
            let z = [[1.0, 0.0], [0.0, -1.0]];
            let r = [[0.7, 0.2], [0.2, 0.3]];
            let conj2 = |m: [[f64; 2]; 2]| {
                let mut out = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            for l in 0..2 {
                                out[i][j] += m[i][k] * r[k][l] * m[j][l];
                            }
                        }
                    }
                }
                out
            };
            let xr = conj2(x);
            let zr = conj2(z);
            // YρY = Z X ρ X Z (up to phases that cancel): compute via XρX then Z.
            let mut yr = conj2(x);
            yr[0][1] = -yr[0][1];
            yr[1][0] = -yr[1][0];
            let q = p / 4.0; // (1-3p/4)ρ + (p/4)(XρX+YρY+ZρZ) reproduces depol(p)
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] = (1.0 - 3.0 * q) * r[i][j] + q * (xr[i][j] + yr[i][j] + zr[i][j]);
                }
            }
            out
        };
        rho.depolarize_1q(0, p);
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(rho.entry(i, j).re, kraus_expected[i][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_channel_matches_pure_path() {
        let mut circ = Circuit::new(2);
        circ.push(Gate::H { q: 0 }).unwrap();
        circ.push(Gate::Ry { q: 1, angle: 0.7 }).unwrap();
        circ.push(Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        circ.push(Gate::Phase { q: 1, angle: -0.4 }).unwrap();

        let mut sv = StateVector::ground(2);
        sv.apply_circuit(&circ).unwrap();
        let pure = DensityMatrix::from_statevector(&sv);

        let mut rho = DensityMatrix::ground(2);
        rho.apply_circuit_noisy(&circ, &NoiseSpec::none()).unwrap();

        for (a, b) in rho.entries().iter().zip(pure.entries()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_is_depolarizing_fixed_point() {
        let dim = 4;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(0.25, 0.0);
        }
        let mixed = DensityMatrix::from_entries(2, data).unwrap();
        let mut a = mixed.clone();
        a.depolarize_1q(0, 0.3);
        a.depolarize_2q(0, 1, 0.8);
        for (x, y) in a.entries().iter().zip(mixed.entries()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn damping_monotonically_raises_z() {
        let mut prev = -1.0;
        for k in 0..=10 {
            let gamma = k as f64 / 10.0;
            let mut rho = one_qubit([0.1, 0.0, 0.0, 0.9]);
            rho.amplitude_damp(0, gamma);
            let z = rho.probabilities().z_expectations()[0];
            assert!(z >= prev - 1e-12, "gamma={gamma}: z={z} < prev={prev}");
            prev = z;
        }
        assert_abs_diff_eq!(prev, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_preserved_under_noisy_circuit() {
        let mut circ = Circuit::new(3);
        circ.push(Gate::H { q: 0 }).unwrap();
        circ.push(Gate::Cnot {
            control: 0,
            target: 2,
        })
        .unwrap();
        circ.push(Gate::Rx { q: 1, angle: 1.2 }).unwrap();
        circ.push(Gate::Cz { a: 1, b: 2 }).unwrap();
        let noise = NoiseSpec {
            p_depol_1q: 0.02,
            p_depol_2q: 0.05,
            readout_eps: 0.0,
            t1_us: Some(80.0),
            ..NoiseSpec::none()
        };
        let mut rho = DensityMatrix::ground(3);
        rho.apply_circuit_noisy(&circ, &noise).unwrap();
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-9);
        assert!(rho.hermiticity_defect() < 1e-10);
        let p = rho.probabilities();
        p.validate().unwrap();
    }
}
