//! Exact simulation of gate circuits on pure states (statevector) and mixed
//! states (density matrix / Pauli transfer representation), with measurement
//! statistics, Pauli-Z expectations, single-qubit reduced states, entropy,
//! and parameterized noise channels.
//!
//! Bit convention (global, fixed): basis index `s` is big-endian in qubit
//! order — bit `i` of `s` (counting from the most significant used bit) is
//! the outcome of qubit `i`. Equivalently qubit `i` owns bit position
//! `n_qubits − 1 − i` of the integer index, and ascending integer order is
//! lexicographic bitstring order.

pub mod density;
pub mod gate;
pub mod noise;
pub mod prob;
pub mod ptm;
pub mod statevector;

pub use density::DensityMatrix;
pub use gate::{dagger, Circuit, Gate};
pub use noise::NoiseSpec;
pub use prob::ProbDist;
pub use ptm::{CompiledNoisyCircuit, PauliState};
pub use statevector::StateVector;

/// Integer-index bit mask owned by `qubit` under the big-endian convention.
#[inline]
pub(crate) fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1usize << (n_qubits - 1 - qubit)
}
