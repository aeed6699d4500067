//! Gate alphabet and circuits.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// One gate from the fixed alphabet. Angles are radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H { q: usize },
    Rx { q: usize, angle: f64 },
    Ry { q: usize, angle: f64 },
    Rz { q: usize, angle: f64 },
    Phase { q: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
}

impl Gate {
    /// Qubits touched by the gate, lowest index first for symmetric gates.
    pub fn support(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H { q }
            | Gate::Rx { q, .. }
            | Gate::Ry { q, .. }
            | Gate::Rz { q, .. }
            | Gate::Phase { q, .. } => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
            Gate::Cz { a, b } => (a, Some(b)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. } | Gate::Cz { .. })
    }

    /// Inverse gate: rotations and phases negate their angle, the rest are
    /// self-inverse.
    pub fn dagger(&self) -> Gate {
        match *self {
            Gate::Rx { q, angle } => Gate::Rx { q, angle: -angle },
            Gate::Ry { q, angle } => Gate::Ry { q, angle: -angle },
            Gate::Rz { q, angle } => Gate::Rz { q, angle: -angle },
            Gate::Phase { q, angle } => Gate::Phase { q, angle: -angle },
            g => g,
        }
    }

    /// 2×2 unitary for single-qubit gates; `None` for two-qubit gates.
    pub fn unitary_1q(&self) -> Option<[[Complex64; 2]; 2]> {
        let z = Complex64::new(0.0, 0.0);
        let m = match *self {
            Gate::H { .. } => {
                let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::Rx { angle, .. } => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ]
            }
            Gate::Ry { angle, .. } => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
            Gate::Rz { angle, .. } => [
                [Complex64::from_polar(1.0, -angle / 2.0), z],
                [z, Complex64::from_polar(1.0, angle / 2.0)],
            ],
            Gate::Phase { angle, .. } => [
                [Complex64::new(1.0, 0.0), z],
                [z, Complex64::from_polar(1.0, angle)],
            ],
            _ => return None,
        };
        Some(m)
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. }
            | Gate::Ry { angle, .. }
            | Gate::Rz { angle, .. }
            | Gate::Phase { angle, .. } => Some(angle),
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H { q } => write!(f, "H q{q}"),
            Gate::Rx { q, angle } => write!(f, "RX q{q} {angle:.12}"),
            Gate::Ry { q, angle } => write!(f, "RY q{q} {angle:.12}"),
            Gate::Rz { q, angle } => write!(f, "RZ q{q} {angle:.12}"),
            Gate::Phase { q, angle } => write!(f, "PHASE q{q} {angle:.12}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control} q{target}"),
            Gate::Cz { a, b } => write!(f, "CZ q{a} q{b}"),
        }
    }
}

/// Ordered gate program on a fixed qubit register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let (a, b) = gate.support();
        if a >= self.n_qubits {
            return Err(CoreError::QubitOutOfRange {
                qubit: a,
                n_qubits: self.n_qubits,
            });
        }
        if let Some(b) = b {
            if b >= self.n_qubits {
                return Err(CoreError::QubitOutOfRange {
                    qubit: b,
                    n_qubits: self.n_qubits,
                });
            }
            if a == b {
                return Err(CoreError::FeatureMap(format!(
                    "two-qubit gate with identical operands q{a}"
                )));
            }
        }
        if let Some(angle) = gate.angle() {
            if !angle.is_finite() {
                return Err(CoreError::NonFinite("gate angle"));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(CoreError::QubitCountMismatch {
                got: other.n_qubits,
                expected: self.n_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count()
    }
}

impl fmt::Display for Circuit {
    /// One gate per line: `KIND q... [angle]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.gates.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Inverse circuit: reversed gate order, each gate inverted.
pub fn dagger(circuit: &Circuit) -> Circuit {
    Circuit {
        n_qubits: circuit.n_qubits,
        gates: circuit.gates.iter().rev().map(Gate::dagger).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dagger_negates_rotations_and_is_involutive() {
        let mut c = Circuit::new(2);
        c.push(Gate::Ry { q: 0, angle: 0.3 }).unwrap();
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        c.push(Gate::Phase { q: 1, angle: -1.1 }).unwrap();

        let d = dagger(&c);
        assert_eq!(d.gates()[0], Gate::Phase { q: 1, angle: 1.1 });
        assert_eq!(
            d.gates()[1],
            Gate::Cnot {
                control: 0,
                target: 1
            }
        );
        assert_eq!(d.gates()[2], Gate::Ry { q: 0, angle: -0.3 });
        assert_eq!(dagger(&d), c);
    }

    #[test]
    fn push_validates_operands() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::H { q: 2 }).is_err());
        assert!(c
            .push(Gate::Cnot {
                control: 1,
                target: 1
            })
            .is_err());
        assert!(c
            .push(Gate::Ry {
                q: 0,
                angle: f64::NAN
            })
            .is_err());
        assert!(c.push(Gate::Cz { a: 0, b: 1 }).is_ok());
    }

    #[test]
    fn pretty_printer_format() {
        let mut c = Circuit::new(2);
        c.push(Gate::H { q: 0 }).unwrap();
        c.push(Gate::Ry { q: 1, angle: -0.35 }).unwrap();
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        let text = alloc::format!("{c}");
        assert_eq!(text, "H q0\nRY q1 -0.350000000000\nCNOT q0 q1");
    }
}
