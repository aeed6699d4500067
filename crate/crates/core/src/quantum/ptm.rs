//! Exact mixed-state simulation in the Pauli basis.
//!
//! A density operator is stored as the real coefficient vector
//! `c_P = Tr(P ρ)` over the `4^n` Pauli strings, with qubit `i`'s letter at
//! base-4 digit position `n−1−i` (mirroring the bitstring convention). Every
//! gate and every noise channel acts as a real linear map (Pauli transfer
//! matrix) on at most two digits, so one gate-plus-channels step is a single
//! block-local pass. Consecutive operations whose combined support fits in
//! two qubits are fused into one transfer matrix at compile time; operations
//! on disjoint supports commute, which lets the compiler fuse across
//! unrelated interleaved gates.
//!
//! This path is algebraically identical to [`DensityMatrix::apply_circuit_noisy`]
//! and is cross-checked against it in the test suite; it exists because the
//! dense path costs `O(4^n)` complex work per gate with a large constant,
//! which dominates long noisy reservoir runs.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::quantum::density::DensityMatrix;
use crate::quantum::gate::{Circuit, Gate};
use crate::quantum::noise::NoiseSpec;
use crate::quantum::prob::ProbDist;

type Mat4 = [[f64; 4]; 4];
/// Row-major 16×16 transfer matrix for a qubit pair.
type Mat16 = Box<[f64; 256]>;

const I2: [[Complex64; 2]; 2] = {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    [[o, z], [z, o]]
};

fn paulis() -> [[[Complex64; 2]; 2]; 4] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        I2,
        [[z, o], [o, z]],
        [[z, -i], [i, z]],
        [[o, z], [z, -o]],
    ]
}

fn mat4_identity() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn mat16_mul(a: &[f64; 256], b: &[f64; 256]) -> Mat16 {
    let mut out = Box::new([0.0; 256]);
    for i in 0..16 {
        for k in 0..16 {
            let aik = a[i * 16 + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..16 {
                out[i * 16 + j] += aik * b[k * 16 + j];
            }
        }
    }
    out
}

/// Kronecker product in (first-slot, second-slot) digit order:
/// `R[(4i+j),(4k+l)] = a[i][k]·b[j][l]`.
fn kron4(a: &Mat4, b: &Mat4) -> Mat16 {
    let mut out = Box::new([0.0; 256]);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    out[(4 * i + j) * 16 + (4 * k + l)] = a[i][k] * b[j][l];
                }
            }
        }
    }
    out
}

fn embed_into_pair(m: &Mat4, slot: usize) -> Mat16 {
    if slot == 0 {
        kron4(m, &mat4_identity())
    } else {
        kron4(&mat4_identity(), m)
    }
}

/// Transfer matrix of a single-qubit unitary: `R[a][b] = Re Tr(σ_a U σ_b U†)/2`.
pub fn ptm_1q(u: &[[Complex64; 2]; 2]) -> Mat4 {
    let sigma = paulis();
    let mut r = [[0.0; 4]; 4];
    for (b, sb) in sigma.iter().enumerate() {
        // M = U σ_b U†
        let mut us = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    us[i][j] += u[i][k] * sb[k][j];
                }
            }
        }
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    m[i][j] += us[i][k] * u[j][k].conj();
                }
            }
        }
        for (a, sa) in sigma.iter().enumerate() {
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for k in 0..2 {
                    tr += sa[i][k] * m[k][i];
                }
            }
            r[a][b] = 0.5 * tr.re;
        }
    }
    r
}

/// Transfer matrix of a two-qubit unitary given in the
/// `(bit_first, bit_second)` basis: `R[a][b] = Re Tr(P_a U P_b U†)/4`.
fn ptm_2q(u: &[[Complex64; 4]; 4]) -> Mat16 {
    let sigma = paulis();
    // P_m = σ_{m/4} ⊗ σ_{m%4} as 4×4.
    let pauli4 = |m: usize| {
        let (sa, sb) = (&sigma[m / 4], &sigma[m % 4]);
        let mut p = [[Complex64::new(0.0, 0.0); 4]; 4];
        for ra in 0..2 {
            for rb in 0..2 {
                for ca in 0..2 {
                    for cb in 0..2 {
                        p[2 * ra + rb][2 * ca + cb] = sa[ra][ca] * sb[rb][cb];
                    }
                }
            }
        }
        p
    };
    let mul4 = |a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]| {
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                let aik = a[i][k];
                for j in 0..4 {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
        out
    };
    let adjoint = |a: &[[Complex64; 4]; 4]| {
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = a[j][i].conj();
            }
        }
        out
    };
    let udag = adjoint(u);
    let mut r = Box::new([0.0; 256]);
    for b in 0..16 {
        let m = mul4(&mul4(u, &pauli4(b)), &udag);
        for a in 0..16 {
            let pa = pauli4(a);
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                for k in 0..4 {
                    tr += pa[i][k] * m[k][i];
                }
            }
            r[a * 16 + b] = 0.25 * tr.re;
        }
    }
    r
}

fn depol1_ptm(p: f64) -> Mat4 {
    let mut m = mat4_identity();
    for (i, row) in m.iter_mut().enumerate().skip(1) {
        row[i] = 1.0 - p;
    }
    m
}

fn damp_ptm(gamma: f64) -> Mat4 {
    let s = (1.0 - gamma).sqrt();
    let mut m = [[0.0; 4]; 4];
    m[0][0] = 1.0;
    m[1][1] = s;
    m[2][2] = s;
    m[3][0] = gamma;
    m[3][3] = 1.0 - gamma;
    m
}

/// Scales every non-identity row: the two-qubit depolarizing channel is
/// diagonal in the Pauli basis.
fn apply_depol2_left(m: &mut Mat16, p: f64) {
    let keep = 1.0 - p;
    for row in 1..16 {
        for col in 0..16 {
            m[row * 16 + col] *= keep;
        }
    }
}

/// Two-qubit unitary of CNOT/CZ in the `(bit_first, bit_second)` basis where
/// the first slot is the lower-numbered qubit.
fn two_qubit_unitary(gate: &Gate, first: usize) -> [[Complex64; 4]; 4] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let mut u = [[z; 4]; 4];
    match *gate {
        Gate::Cnot { control, .. } => {
            for basis in 0..4 {
                let (bf, bs) = (basis >> 1, basis & 1);
                let (out_f, out_s) = if control == first {
                    (bf, bs ^ bf)
                } else {
                    (bf ^ bs, bs)
                };
                u[2 * out_f + out_s][basis] = o;
            }
        }
        Gate::Cz { .. } => {
            for basis in 0..4 {
                u[basis][basis] = if basis == 3 { -o } else { o };
            }
        }
        _ => unreachable!("not a two-qubit gate"),
    }
    u
}

enum Segment {
    One { qubit: usize, ptm: Mat4 },
    Two { a: usize, b: usize, ptm: Mat16 },
}

impl Segment {
    fn support(&self) -> (usize, Option<usize>) {
        match self {
            Segment::One { qubit, .. } => (*qubit, None),
            Segment::Two { a, b, .. } => (*a, Some(*b)),
        }
    }
}

/// A circuit plus gate-attached noise compiled into fused block-local
/// transfer-matrix segments.
pub struct CompiledNoisyCircuit {
    n_qubits: usize,
    segments: Vec<Segment>,
}

impl CompiledNoisyCircuit {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn compile(circuit: &Circuit, noise: &NoiseSpec) -> Result<Self> {
        noise.validate()?;
        let p1 = noise.p_depol_1q;
        let p2 = noise.p_depol_2q;
        let g1 = noise.gamma_1q();
        let g2 = noise.gamma_2q();
        let depol1 = depol1_ptm(p1);
        let damp1 = damp_ptm(g1);
        let damp2 = damp_ptm(g2);

        let mut segments: Vec<Segment> = Vec::new();
        for gate in circuit.gates() {
            let (qa, qb) = gate.support();
            match qb {
                None => {
                    let mut m = ptm_1q(&gate.unitary_1q().expect("1q gate"));
                    if p1 > 0.0 {
                        m = mat4_mul(&depol1, &m);
                    }
                    if g1 > 0.0 {
                        m = mat4_mul(&damp1, &m);
                    }
                    merge_op(&mut segments, qa, None, OpPtm::One(m));
                }
                Some(qb) => {
                    let (lo, hi) = (qa.min(qb), qa.max(qb));
                    let mut m = ptm_2q(&two_qubit_unitary(gate, lo));
                    if p2 > 0.0 {
                        apply_depol2_left(&mut m, p2);
                    }
                    if g2 > 0.0 {
                        let d = kron4(&damp2, &damp2);
                        m = mat16_mul(&d, &m);
                    }
                    merge_op(&mut segments, lo, Some(hi), OpPtm::Two(m));
                }
            }
        }
        Ok(Self {
            n_qubits: circuit.n_qubits(),
            segments,
        })
    }
}

enum OpPtm {
    One(Mat4),
    Two(Mat16),
}

fn overlaps(sa: (usize, Option<usize>), sb: (usize, Option<usize>)) -> bool {
    let contains = |s: (usize, Option<usize>), q: usize| s.0 == q || s.1 == Some(q);
    contains(sb, sa.0) || sa.1.is_some_and(|q| contains(sb, q))
}

/// Composes `later ∘ earlier` when the combined support fits in two qubits.
fn try_fuse(earlier: &Segment, later: &Segment) -> Option<Segment> {
    match (earlier, later) {
        (Segment::One { qubit: qe, ptm: pe }, Segment::One { qubit: ql, ptm: pl }) => {
            // Overlapping single-qubit supports are equal.
            debug_assert_eq!(qe, ql);
            Some(Segment::One {
                qubit: *qe,
                ptm: mat4_mul(pl, pe),
            })
        }
        (Segment::One { qubit, ptm: pe }, Segment::Two { a, b, ptm: pl }) => {
            let slot = if qubit == a { 0 } else { 1 };
            Some(Segment::Two {
                a: *a,
                b: *b,
                ptm: mat16_mul(pl, &embed_into_pair(pe, slot)),
            })
        }
        (Segment::Two { a, b, ptm: pe }, Segment::One { qubit, ptm: pl }) => {
            let slot = if a == qubit { 0 } else { 1 };
            Some(Segment::Two {
                a: *a,
                b: *b,
                ptm: mat16_mul(&embed_into_pair(pl, slot), pe),
            })
        }
        (Segment::Two { a, b, ptm: pe }, Segment::Two { a: a2, b: b2, ptm: pl }) => {
            if a == a2 && b == b2 {
                Some(Segment::Two {
                    a: *a,
                    b: *b,
                    ptm: mat16_mul(pl, pe),
                })
            } else {
                None // distinct overlapping pairs: support would exceed two qubits
            }
        }
    }
}

/// Inserts an operation into the segment list, repeatedly folding it into the
/// nearest preceding segment it cannot commute past (operations on disjoint
/// supports commute exactly). The folded segment keeps the position of its
/// earliest constituent so ordering against non-commuting segments is
/// preserved.
fn fold_in(segments: &mut Vec<Segment>, seg: Segment) {
    let mut seg = seg;
    let mut hi = segments.len();
    loop {
        let sup = seg.support();
        let mut k = hi;
        while k > 0 && !overlaps(segments[k - 1].support(), sup) {
            k -= 1;
        }
        if k == 0 {
            segments.insert(0, seg);
            return;
        }
        match try_fuse(&segments[k - 1], &seg) {
            Some(fused) => {
                segments.remove(k - 1);
                seg = fused;
                hi = k - 1;
            }
            None => {
                segments.insert(k, seg);
                return;
            }
        }
    }
}

fn merge_op(segments: &mut Vec<Segment>, qa: usize, qb: Option<usize>, op: OpPtm) {
    let seg = match op {
        OpPtm::One(m) => Segment::One { qubit: qa, ptm: m },
        OpPtm::Two(m) => Segment::Two {
            a: qa,
            b: qb.expect("two-qubit op"),
            ptm: m,
        },
    };
    fold_in(segments, seg);
}

/// Mixed state in the Pauli-coefficient representation.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliState {
    n_qubits: usize,
    coeffs: Vec<f64>,
}

impl PauliState {
    /// `|0…0⟩⟨0…0|`: coefficient 1 on every `{I,Z}`-only string.
    pub fn ground(n_qubits: usize) -> Self {
        let len = 1usize << (2 * n_qubits);
        let mut coeffs = vec![0.0; len];
        // Enumerate {I,Z}^n strings via bitmask.
        for m in 0..(1usize << n_qubits) {
            let mut idx = 0usize;
            for i in 0..n_qubits {
                if m & (1 << i) != 0 {
                    idx += 3 * (1usize << (2 * i));
                }
            }
            coeffs[idx] = 1.0;
        }
        Self { n_qubits, coeffs }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn digit_stride(&self, qubit: usize) -> usize {
        1usize << (2 * (self.n_qubits - 1 - qubit))
    }

    fn apply_1q(&mut self, qubit: usize, r: &Mat4) {
        let s = self.digit_stride(qubit);
        let len = self.coeffs.len();
        let mut base = 0;
        while base < len {
            for lo in base..base + s {
                let x = [
                    self.coeffs[lo],
                    self.coeffs[lo + s],
                    self.coeffs[lo + 2 * s],
                    self.coeffs[lo + 3 * s],
                ];
                for d in 0..4 {
                    self.coeffs[lo + d * s] =
                        r[d][0] * x[0] + r[d][1] * x[1] + r[d][2] * x[2] + r[d][3] * x[3];
                }
            }
            base += 4 * s;
        }
    }

    fn apply_2q(&mut self, a: usize, b: usize, r: &[f64; 256]) {
        debug_assert!(a < b);
        let sa = self.digit_stride(a);
        let sb = self.digit_stride(b);
        let len = self.coeffs.len();
        let mut x = [0.0f64; 16];
        let mut ia = 0;
        while ia < len {
            let mut ib = ia;
            while ib < ia + sa {
                for lo in ib..ib + sb {
                    for da in 0..4 {
                        for db in 0..4 {
                            x[4 * da + db] = self.coeffs[lo + da * sa + db * sb];
                        }
                    }
                    for u in 0..16 {
                        let row = &r[u * 16..u * 16 + 16];
                        let mut acc = 0.0;
                        for v in 0..16 {
                            acc += row[v] * x[v];
                        }
                        self.coeffs[lo + (u / 4) * sa + (u % 4) * sb] = acc;
                    }
                }
                ib += 4 * sb;
            }
            ia += 4 * sa;
        }
    }

    pub fn apply_compiled(&mut self, compiled: &CompiledNoisyCircuit) -> Result<()> {
        if compiled.n_qubits != self.n_qubits {
            return Err(CoreError::QubitCountMismatch {
                got: compiled.n_qubits,
                expected: self.n_qubits,
            });
        }
        for seg in &compiled.segments {
            match seg {
                Segment::One { qubit, ptm } => self.apply_1q(*qubit, ptm),
                Segment::Two { a, b, ptm } => self.apply_2q(*a, *b, ptm),
            }
        }
        Ok(())
    }

    /// Computational-basis distribution: a Walsh–Hadamard transform of the
    /// `{I,Z}`-string coefficients divided by `2^n`.
    pub fn probabilities(&self) -> ProbDist {
        let n = self.n_qubits;
        let mut q = vec![0.0f64; 1 << n];
        for (m, slot) in q.iter_mut().enumerate() {
            let mut idx = 0usize;
            for i in 0..n {
                if m & (1 << i) != 0 {
                    idx += 3 * (1usize << (2 * i));
                }
            }
            *slot = self.coeffs[idx];
        }
        for bit in 0..n {
            let mask = 1usize << bit;
            for s in 0..q.len() {
                if s & mask == 0 {
                    let a = q[s];
                    let b = q[s | mask];
                    q[s] = a + b;
                    q[s | mask] = a - b;
                }
            }
        }
        let scale = 1.0 / (1u64 << n) as f64;
        let probs = q
            .into_iter()
            .map(|v| {
                let p = v * scale;
                // Rounding guard: exact CPTP evolution keeps the diagonal
                // non-negative up to floating-point error.
                if p < 0.0 && p > -1e-9 {
                    0.0
                } else {
                    p
                }
            })
            .collect();
        ProbDist::new_unchecked(n, probs)
    }

    /// Dense density matrix (test/diagnostic use; `O(4^n)` memory).
    pub fn to_density(&self) -> DensityMatrix {
        let n = self.n_qubits;
        let len = self.coeffs.len();
        let mut work: Vec<Complex64> = self
            .coeffs
            .iter()
            .map(|&c| Complex64::new(c, 0.0))
            .collect();
        let half = Complex64::new(0.5, 0.0);
        let i_unit = Complex64::new(0.0, 1.0);
        for qubit in 0..n {
            let s = 1usize << (2 * (n - 1 - qubit));
            let mut base = 0;
            while base < len {
                for lo in base..base + s {
                    let vi = work[lo];
                    let vx = work[lo + s];
                    let vy = work[lo + 2 * s];
                    let vz = work[lo + 3 * s];
                    work[lo] = (vi + vz) * half; // e00
                    work[lo + s] = (vx - i_unit * vy) * half; // e01
                    work[lo + 2 * s] = (vx + i_unit * vy) * half; // e10
                    work[lo + 3 * s] = (vi - vz) * half; // e11
                }
                base += 4 * s;
            }
        }
        // Digits are (row_bit, col_bit) pairs; split into (row, col) indices.
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (m, &v) in work.iter().enumerate() {
            let mut r = 0usize;
            let mut c = 0usize;
            for i in 0..n {
                let d = (m >> (2 * (n - 1 - i))) & 3;
                r |= (d >> 1) << (n - 1 - i);
                c |= (d & 1) << (n - 1 - i);
            }
            data[r * dim + c] = v;
        }
        DensityMatrix::from_entries(n, data).expect("dimensions are consistent")
    }

    /// Pauli coefficients of a dense density matrix (test/diagnostic use).
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let n = rho.n_qubits();
        let dim = 1usize << n;
        let len = 1usize << (2 * n);
        let mut work = vec![Complex64::new(0.0, 0.0); len];
        for r in 0..dim {
            for c in 0..dim {
                let mut m = 0usize;
                for i in 0..n {
                    let rb = (r >> (n - 1 - i)) & 1;
                    let cb = (c >> (n - 1 - i)) & 1;
                    m |= (2 * rb + cb) << (2 * (n - 1 - i));
                }
                work[m] = rho.entry(r, c);
            }
        }
        let i_unit = Complex64::new(0.0, 1.0);
        for qubit in 0..n {
            let s = 1usize << (2 * (n - 1 - qubit));
            let mut base = 0;
            while base < len {
                for lo in base..base + s {
                    let e00 = work[lo];
                    let e01 = work[lo + s];
                    let e10 = work[lo + 2 * s];
                    let e11 = work[lo + 3 * s];
                    work[lo] = e00 + e11;
                    work[lo + s] = e01 + e10;
                    work[lo + 2 * s] = i_unit * (e01 - e10);
                    work[lo + 3 * s] = e00 - e11;
                }
                base += 4 * s;
            }
        }
        Self {
            n_qubits: n,
            coeffs: work.into_iter().map(|v| v.re).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::statevector::StateVector;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_circuit(n: usize, len: usize, rng: &mut impl Rng) -> Circuit {
        let mut c = Circuit::new(n);
        for _ in 0..len {
            let angle = rng.gen_range(-3.0..3.0);
            let q = rng.gen_range(0..n);
            let gate = match rng.gen_range(0..7) {
                0 => Gate::H { q },
                1 => Gate::Rx { q, angle },
                2 => Gate::Ry { q, angle },
                3 => Gate::Rz { q, angle },
                4 => Gate::Phase { q, angle },
                i => {
                    if n < 2 {
                        Gate::Ry { q, angle }
                    } else {
                        let mut r = rng.gen_range(0..n);
                        while r == q {
                            r = rng.gen_range(0..n);
                        }
                        if i == 5 {
                            Gate::Cnot {
                                control: q,
                                target: r,
                            }
                        } else {
                            Gate::Cz {
                                a: q.min(r),
                                b: q.max(r),
                            }
                        }
                    }
                }
            };
            c.push(gate).unwrap();
        }
        c
    }

    #[test]
    fn ground_state_round_trip() {
        let ps = PauliState::ground(3);
        let rho = ps.to_density();
        assert_abs_diff_eq!(rho.entry(0, 0).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-14);
        let back = PauliState::from_density(&rho);
        for (a, b) in back.coeffs.iter().zip(&ps.coeffs) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-14);
        }
        let p = ps.probabilities();
        assert_abs_diff_eq!(p.probs()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn noiseless_compiled_path_matches_statevector() {
        let mut rng = crate::rng::rng_from_seed(11);
        for n in 1..=4usize {
            for _ in 0..10 {
                let circ = random_circuit(n, 25, &mut rng);
                let mut sv = StateVector::ground(n);
                sv.apply_circuit(&circ).unwrap();
                let expected = sv.probabilities();

                let compiled = CompiledNoisyCircuit::compile(&circ, &NoiseSpec::none()).unwrap();
                let mut ps = PauliState::ground(n);
                ps.apply_compiled(&compiled).unwrap();
                let got = ps.probabilities();

                for (a, b) in got.probs().iter().zip(expected.probs()) {
                    assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn noisy_compiled_path_matches_dense_reference() {
        let mut rng = crate::rng::rng_from_seed(23);
        let noise = NoiseSpec {
            p_depol_1q: 0.013,
            p_depol_2q: 0.045,
            readout_eps: 0.0,
            t1_us: Some(60.0),
            ..NoiseSpec::none()
        };
        for n in 2..=4usize {
            for _ in 0..6 {
                let circ = random_circuit(n, 30, &mut rng);

                let mut dense = DensityMatrix::ground(n);
                dense.apply_circuit_noisy(&circ, &noise).unwrap();

                let compiled = CompiledNoisyCircuit::compile(&circ, &noise).unwrap();
                let mut ps = PauliState::ground(n);
                ps.apply_compiled(&compiled).unwrap();
                let via_ptm = ps.to_density();

                for (a, b) in via_ptm.entries().iter().zip(dense.entries()) {
                    assert!((a - b).norm() < 1e-12, "entry mismatch: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn fusion_reduces_segment_count() {
        // Two consecutive rotations on one qubit compile to one segment.
        let mut c = Circuit::new(2);
        c.push(Gate::Ry { q: 0, angle: 0.4 }).unwrap();
        c.push(Gate::Rz { q: 0, angle: 0.9 }).unwrap();
        c.push(Gate::Ry { q: 1, angle: 0.1 }).unwrap();
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        let compiled = CompiledNoisyCircuit::compile(&c, &NoiseSpec::none()).unwrap();
        assert_eq!(compiled.n_segments(), 1);
    }

    #[test]
    fn damping_ptm_matches_kraus() {
        // PTM route vs the dense Kraus update on a random-ish 1-qubit state.
        let gamma = 0.37;
        let rho = DensityMatrix::from_entries(
            1,
            vec![
                Complex64::new(0.6, 0.0),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.4, 0.0),
            ],
        )
        .unwrap();
        let mut dense = rho.clone();
        dense.amplitude_damp(0, gamma);

        let mut ps = PauliState::from_density(&rho);
        ps.apply_1q(0, &damp_ptm(gamma));
        let via_ptm = ps.to_density();
        for (a, b) in via_ptm.entries().iter().zip(dense.entries()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
