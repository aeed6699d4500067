//! Encoder circuits and the per-timestep composite circuit.
//!
//! Two feature maps are provided. `CpMap` packs two features per qubit
//! (an RY/RZ rotation pair) followed by three brick-pattern layers of
//! parameterized two-qubit entangling blocks; each layer runs the even-aligned
//! pairs then the odd-aligned pairs, so a layer holds `n_q − 1` blocks and the
//! full encoder costs `9(n_q − 1)` CNOTs — about `9F/2` for even `F`.
//! `ZzFeatureMap` is the standard Hadamard + data-phase + pairwise ZZ-phase
//! encoder on `F` qubits with nearest-neighbour entanglement, the ZZ phase
//! realized as CNOT·P·CNOT.
//!
//! The reservoir's step circuit is `U(x)` followed by `U†(Π(z))`, where `Π`
//! zero-pads the fed-back vector up to the encoder's feature count.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::quantum::gate::{dagger, Circuit, Gate};

/// Which encoder circuit to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureMapKind {
    CpMap,
    ZzFeatureMap,
}

/// Internal angles used by every CPMap entangling block (shared across
/// blocks), pinned so runs are replayable without extra inputs.
pub const DEFAULT_THETAS: [f64; 6] = [0.35, -0.20, 0.55, 0.10, -0.45, 0.25];

/// Encoder parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    /// Number of classical features `F` consumed per invocation.
    pub n_features: usize,
    /// Repetition count (ZZ map only).
    pub reps: usize,
    /// CPMap block angles, each in `[−π/2, π/2]`.
    pub thetas: [f64; 6],
}

impl FeatureMapSpec {
    pub fn cpmap(n_features: usize) -> Self {
        Self {
            kind: FeatureMapKind::CpMap,
            n_features,
            reps: 1,
            thetas: DEFAULT_THETAS,
        }
    }

    pub fn zz(n_features: usize, reps: usize) -> Self {
        Self {
            kind: FeatureMapKind::ZzFeatureMap,
            n_features,
            reps,
            thetas: DEFAULT_THETAS,
        }
    }

    /// Register width: `⌈F/2⌉` for CPMap, `F` for the ZZ map.
    pub fn n_qubits(&self) -> usize {
        match self.kind {
            FeatureMapKind::CpMap => self.n_features.div_ceil(2),
            FeatureMapKind::ZzFeatureMap => self.n_features,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FeatureMapKind::CpMap if self.n_features < 2 => {
                return Err(CoreError::FeatureMap(format!(
                    "CPMap needs at least 2 features, got {}",
                    self.n_features
                )));
            }
            FeatureMapKind::ZzFeatureMap if self.n_features < 1 => {
                return Err(CoreError::FeatureMap("ZZ map needs at least 1 feature".into()));
            }
            _ => {}
        }
        if self.reps == 0 {
            return Err(CoreError::FeatureMap("reps must be positive".into()));
        }
        let bound = core::f64::consts::FRAC_PI_2 + 1e-12;
        for (i, t) in self.thetas.iter().enumerate() {
            if !t.is_finite() || t.abs() > bound {
                return Err(CoreError::FeatureMap(format!(
                    "theta[{i}] = {t} outside [-pi/2, pi/2]"
                )));
            }
        }
        Ok(())
    }
}

fn check_features(spec: &FeatureMapSpec, x: &[f64]) -> Result<()> {
    spec.validate()?;
    if x.len() != spec.n_features {
        return Err(CoreError::DimensionMismatch {
            expected: spec.n_features,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::NonFinite("feature vector"));
    }
    Ok(())
}

fn cpmap_block(c: &mut Circuit, a: usize, b: usize, t: &[f64; 6]) -> Result<()> {
    c.push(Gate::Cnot {
        control: a,
        target: b,
    })?;
    c.push(Gate::Ry { q: a, angle: t[0] })?;
    c.push(Gate::Ry { q: b, angle: t[1] })?;
    c.push(Gate::Cnot {
        control: b,
        target: a,
    })?;
    c.push(Gate::Rz { q: a, angle: t[2] })?;
    c.push(Gate::Ry { q: b, angle: t[3] })?;
    c.push(Gate::Cnot {
        control: a,
        target: b,
    })?;
    c.push(Gate::Ry { q: a, angle: t[4] })?;
    c.push(Gate::Rz { q: b, angle: t[5] })?;
    Ok(())
}

/// CPMap encoder: RY/RZ data rotations (two features per qubit), then three
/// brick layers of entangling blocks.
pub fn build_cpmap(spec: &FeatureMapSpec, x: &[f64]) -> Result<Circuit> {
    if spec.kind != FeatureMapKind::CpMap {
        return Err(CoreError::FeatureMap("spec kind is not CPMap".into()));
    }
    check_features(spec, x)?;
    let n_q = spec.n_qubits();
    let mut c = Circuit::new(n_q);
    for q in 0..n_q {
        c.push(Gate::Ry {
            q,
            angle: x[2 * q],
        })?;
        if 2 * q + 1 < x.len() {
            c.push(Gate::Rz {
                q,
                angle: x[2 * q + 1],
            })?;
        }
    }
    for _layer in 0..3 {
        for start in [0usize, 1] {
            let mut a = start;
            while a + 1 < n_q {
                cpmap_block(&mut c, a, a + 1, &spec.thetas)?;
                a += 2;
            }
        }
    }
    Ok(c)
}

/// ZZ feature map: per repetition, H on every qubit, a data phase `P(2x_i)`
/// per qubit, and a `CNOT·P(2(π−x_i)(π−x_j))·CNOT` block per adjacent pair.
pub fn build_zz(spec: &FeatureMapSpec, x: &[f64]) -> Result<Circuit> {
    if spec.kind != FeatureMapKind::ZzFeatureMap {
        return Err(CoreError::FeatureMap("spec kind is not ZZFeatureMap".into()));
    }
    check_features(spec, x)?;
    let n_q = spec.n_qubits();
    let pi = core::f64::consts::PI;
    let mut c = Circuit::new(n_q);
    for _rep in 0..spec.reps {
        for q in 0..n_q {
            c.push(Gate::H { q })?;
        }
        for q in 0..n_q {
            c.push(Gate::Phase {
                q,
                angle: 2.0 * x[q],
            })?;
        }
        for q in 0..n_q.saturating_sub(1) {
            c.push(Gate::Cnot {
                control: q,
                target: q + 1,
            })?;
            c.push(Gate::Phase {
                q: q + 1,
                angle: 2.0 * (pi - x[q]) * (pi - x[q + 1]),
            })?;
            c.push(Gate::Cnot {
                control: q,
                target: q + 1,
            })?;
        }
    }
    Ok(c)
}

/// Builds the encoder for `spec`.
pub fn build(spec: &FeatureMapSpec, x: &[f64]) -> Result<Circuit> {
    match spec.kind {
        FeatureMapKind::CpMap => build_cpmap(spec, x),
        FeatureMapKind::ZzFeatureMap => build_zz(spec, x),
    }
}

/// Zero-pads a fed-back vector up to the encoder's feature count.
pub fn pad_feedback(z_scaled: &[f64], target_len: usize) -> Result<Vec<f64>> {
    if z_scaled.len() > target_len {
        return Err(CoreError::DimensionMismatch {
            expected: target_len,
            got: z_scaled.len(),
        });
    }
    let mut padded = Vec::with_capacity(target_len);
    padded.extend_from_slice(z_scaled);
    padded.resize(target_len, 0.0);
    Ok(padded)
}

/// Per-timestep circuit `U(x)` followed by `U†(Π(z_scaled))`.
pub fn composite_circuit(spec: &FeatureMapSpec, x: &[f64], z_scaled: &[f64]) -> Result<Circuit> {
    let padded = pad_feedback(z_scaled, spec.n_features)?;
    let mut circuit = build(spec, x)?;
    let feedback_half = build(spec, &padded)?;
    circuit.extend(&dagger(&feedback_half))?;
    Ok(circuit)
}
