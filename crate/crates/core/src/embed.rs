//! Data-encoding circuits and states.
//!
//! Two embeddings carry an input b ∈ 𝔹ⁿ into a quantum state:
//!
//! - the phase embedding H^⊗n X^(b), one qubit per bit, sending each bit to
//!   |±⟩;
//! - the (3,1)-QRAC embedding, one qubit per bit triplet, placing the three
//!   bits into the signs of the X/Y/Z Bloch components (±1/√3 at the default
//!   angles).
//!
//! The module also provides the classical preprocessors used by ensembles
//! (bit-subset selection ν_w / η_w and input permutations), serially repeated
//! phase embeddings, a doubled QRAC embedding, and all-to-all variational
//! SWAP layers.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bitfourier::BitVector;
use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate, QuantumState};

/// Which data embedding a model uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    Phase,
    Qrac,
}

impl EmbeddingKind {
    /// Qubit count for an n-bit input: n for phase, ⌈n/3⌉ for QRAC.
    pub fn qubit_count(&self, n: usize) -> usize {
        match self {
            EmbeddingKind::Phase => n,
            EmbeddingKind::Qrac => n.div_ceil(3),
        }
    }
}

/// One bit triplet (𝓑^(X), 𝓑^(Y), 𝓑^(Z)) feeding a single QRAC qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triplet {
    pub bx: bool,
    pub by: bool,
    pub bz: bool,
}

impl Triplet {
    pub fn new(bx: bool, by: bool, bz: bool) -> Self {
        Self { bx, by, bz }
    }

    pub fn bits(bx: u8, by: u8, bz: u8) -> Self {
        Self::new(bx != 0, by != 0, bz != 0)
    }

    /// All 8 triplets in (bx, by, bz) counting order.
    pub fn all() -> impl Iterator<Item = Triplet> {
        (0..8u8).map(|k| Self::new(k & 1 != 0, k >> 1 & 1 != 0, k >> 2 & 1 != 0))
    }
}

/// Rotation angles of the QRAC encoder. The defaults are the (3,1)-QRAC
/// optimum α₁ = π/4, α₂ = 2·arccos(√(1/2 + 1/(2√3))), which puts every Bloch
/// component at magnitude 1/√3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QracAngles {
    alpha1: f64,
    alpha2: f64,
}

impl QracAngles {
    /// General angles are accepted as long as none of the three Bloch
    /// components sin(α₂)cos(α₁), sin(α₂)sin(α₁), cos(α₂) vanishes.
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        let (x, y, z) = (
            alpha2.sin() * alpha1.cos(),
            alpha2.sin() * alpha1.sin(),
            alpha2.cos(),
        );
        if x.abs() < 1e-9 || y.abs() < 1e-9 || z.abs() < 1e-9 {
            return Err(Error::DegenerateQracAngles { x, y, z });
        }
        Ok(Self { alpha1, alpha2 })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    /// Bloch-component magnitudes (|x|, |y|, |z|) of the encoded qubit.
    pub fn components(&self) -> (f64, f64, f64) {
        (
            self.alpha2.sin() * self.alpha1.cos(),
            self.alpha2.sin() * self.alpha1.sin(),
            self.alpha2.cos(),
        )
    }
}

impl Default for QracAngles {
    fn default() -> Self {
        Self {
            alpha1: PI / 4.0,
            alpha2: 2.0 * (0.5 + 0.5 / 3f64.sqrt()).sqrt().acos(),
        }
    }
}

/// A strictly increasing tuple w = (w₁ < … < w_d) of one-based variable
/// indices, defining the selector ν_w and its right inverse η_w.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSelector {
    n: usize,
    indices: Vec<usize>,
}

impl SubsetSelector {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        let in_range = indices.iter().all(|&i| i >= 1 && i <= n);
        if indices.is_empty() || !increasing || !in_range {
            return Err(Error::BadSelector { indices, n });
        }
        Ok(Self { n, indices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.indices.len()
    }

    /// One-based selected indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// ν_w(b) = (b_{w₁}, …, b_{w_d}).
    pub fn select(&self, b: &BitVector) -> Result<BitVector> {
        if b.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: b.len(),
            });
        }
        let mut bits = 0u32;
        for (pos, &w) in self.indices.iter().enumerate() {
            if b.get(w - 1) {
                bits |= 1 << pos;
            }
        }
        BitVector::new(self.d(), bits)
    }

    /// η_w(b′): place b′ at the selected positions, zero elsewhere, so that
    /// ν_w ∘ η_w is the identity on 𝔹^d.
    pub fn embed(&self, small: &BitVector) -> Result<BitVector> {
        if small.len() != self.d() {
            return Err(Error::LengthMismatch {
                left: self.d(),
                right: small.len(),
            });
        }
        let mut bits = 0u32;
        for (pos, &w) in self.indices.iter().enumerate() {
            if small.get(pos) {
                bits |= 1 << (w - 1);
            }
        }
        BitVector::new(self.n, bits)
    }
}

/// A bijection τ on the one-based index set `[n]`, stored as the array
/// (τ(1), …, τ(n)). Applying it puts b_{τ(i)} at output position i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n + 1];
        for &v in &map {
            if v < 1 || v > n || seen[v] {
                return Err(Error::BadPermutation { map, n });
            }
            seen[v] = true;
        }
        if n == 0 {
            return Err(Error::BadPermutation { map, n });
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// τ(i) for one-based i.
    pub fn image(&self, i: usize) -> usize {
        self.map[i - 1]
    }

    /// The one-based index array (τ(1), …, τ(n)).
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            map[v - 1] = i + 1;
        }
        Self { map }
    }

    /// (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(Self {
            map: (1..=self.n()).map(|i| self.image(other.image(i))).collect(),
        })
    }

    /// Output position i holds b_{τ(i)}.
    pub fn apply(&self, b: &BitVector) -> Result<BitVector> {
        if b.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: b.len(),
            });
        }
        let mut bits = 0u32;
        for i in 0..self.n() {
            if b.get(self.map[i] - 1) {
                bits |= 1 << i;
            }
        }
        BitVector::new(self.n(), bits)
    }

    /// All n! permutations in lexicographic order of their index arrays.
    pub fn all(n: usize) -> Vec<Permutation> {
        use itertools::Itertools;
        (1..=n)
            .permutations(n)
            .map(|map| Permutation { map })
            .collect()
    }
}

/// ν_w(b): extract the selected components.
pub fn select_bits(w: &SubsetSelector, b: &BitVector) -> Result<BitVector> {
    w.select(b)
}

/// η_w(b′): the right inverse of ν_w that zero-fills unselected positions.
pub fn embed_bits(w: &SubsetSelector, small: &BitVector) -> Result<BitVector> {
    w.embed(small)
}

/// τ(b): output position i holds b_{τ(i)}.
pub fn permute_bits(tau: &Permutation, b: &BitVector) -> Result<BitVector> {
    tau.apply(b)
}

/// Phase-embedded state ⊗ᵢ H X^{bᵢ}|0⟩: amplitude 2^{−n/2}(−1)^{b·k} at
/// basis index k.
pub fn phase_embed(b: &BitVector) -> Result<QuantumState> {
    let n = b.len();
    if n > crate::qsim::MAX_QUBITS {
        return Err(Error::BadQubitCount {
            m: n,
            max: crate::qsim::MAX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    let mask = b.mask() as usize;
    let amps = (0..dim)
        .map(|k| {
            let sign = if (k & mask).count_ones() & 1 == 1 { -scale } else { scale };
            Complex64::new(sign, 0.0)
        })
        .collect();
    QuantumState::from_amplitudes(n, amps)
}

/// Circuit form of the phase embedding: X^(b) then H on every qubit.
pub fn phase_embed_circuit(b: &BitVector) -> Result<Circuit> {
    let n = b.len();
    let mut c = Circuit::new(n)?;
    for q in 0..n {
        if b.get(q) {
            c.x(q)?;
        }
    }
    for q in 0..n {
        c.h(q)?;
    }
    Ok(c)
}

/// Split b into ⌈n/3⌉ triplets, padding the tail with passive zero bits.
pub fn qrac_triplets(b: &BitVector) -> Vec<Triplet> {
    let n = b.len();
    (0..n.div_ceil(3))
        .map(|i| {
            let at = |k: usize| k < n && b.get(k);
            Triplet::new(at(3 * i), at(3 * i + 1), at(3 * i + 2))
        })
        .collect()
}

/// The two rotation angles (φ_Y, φ_Z) encoding one triplet:
///
/// ```text
/// φ_Z = (𝓑^(X)(π − α₁) + (1 − 𝓑^(X))α₁)·(−1)^{𝓑^(Y)}
/// φ_Y = 𝓑^(Z)(π − α₂) + (1 − 𝓑^(Z))α₂
/// ```
pub fn qrac_angles_for(t: &Triplet, a: &QracAngles) -> (f64, f64) {
    let base_z = if t.bx { PI - a.alpha1 } else { a.alpha1 };
    let phi_z = if t.by { -base_z } else { base_z };
    let phi_y = if t.bz { PI - a.alpha2 } else { a.alpha2 };
    (phi_y, phi_z)
}

/// Single-triplet encoder R_Z(φ_Z)·R_Y(φ_Y) acting on one qubit.
pub fn qrac_triplet_circuit(q: usize, t: &Triplet, a: &QracAngles, c: &mut Circuit) -> Result<()> {
    let (phi_y, phi_z) = qrac_angles_for(t, a);
    c.ry(q, phi_y)?;
    c.rz(q, phi_z)?;
    Ok(())
}

/// Circuit form of the QRAC embedding on ⌈n/3⌉ qubits.
pub fn qrac_embed_circuit(b: &BitVector, a: &QracAngles) -> Result<Circuit> {
    let triplets = qrac_triplets(b);
    let m = triplets.len();
    if m > crate::qsim::MAX_QUBITS {
        return Err(Error::BadQubitCount {
            m,
            max: crate::qsim::MAX_QUBITS,
        });
    }
    let mut c = Circuit::new(m)?;
    for (q, t) in triplets.iter().enumerate() {
        qrac_triplet_circuit(q, t, a, &mut c)?;
    }
    Ok(c)
}

/// QRAC-embedded product state ⊗ᵢ σ(𝓑ᵢ).
pub fn qrac_embed(b: &BitVector, a: &QracAngles) -> Result<QuantumState> {
    qrac_embed_circuit(b, a)?.run(&[])
}

/// Embedded feature state for either embedding (QRAC at default angles).
pub fn embedded_state(kind: EmbeddingKind, b: &BitVector) -> Result<QuantumState> {
    match kind {
        EmbeddingKind::Phase => phase_embed(b),
        EmbeddingKind::Qrac => qrac_embed(b, &QracAngles::default()),
    }
}

/// Embedding circuit for either embedding (QRAC at default angles).
pub fn embedding_circuit(kind: EmbeddingKind, b: &BitVector) -> Result<Circuit> {
    match kind {
        EmbeddingKind::Phase => phase_embed_circuit(b),
        EmbeddingKind::Qrac => qrac_embed_circuit(b, &QracAngles::default()),
    }
}

/// Serially repeated phase embedding on m qubits:
/// V_{w₁}, Z^(ν_{w₁}(b)), V_{w₂}, Z^(ν_{w₂}(b)), …, applied in that order.
/// The first interleave block must be exactly one Hadamard per qubit, and
/// interleave blocks are fixed circuits (no symbolic angles). Each Z is
/// realized as R_Z(π), a harmless global phase per application.
pub fn repeated_phase_embed(
    b: &BitVector,
    partition: &[SubsetSelector],
    interleave: &[Circuit],
) -> Result<Circuit> {
    if partition.is_empty() || partition.len() != interleave.len() {
        return Err(Error::LengthMismatch {
            left: partition.len(),
            right: interleave.len(),
        });
    }
    let m = interleave[0].qubits();
    for v in interleave {
        if v.qubits() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: v.qubits(),
            });
        }
        if v.free_param_count() != 0 {
            return Err(Error::ParameterCount {
                expected: 0,
                got: v.free_param_count(),
            });
        }
    }
    for w in partition {
        if w.d() != m {
            return Err(Error::LengthMismatch {
                left: m,
                right: w.d(),
            });
        }
        if w.n() != b.len() {
            return Err(Error::LengthMismatch {
                left: w.n(),
                right: b.len(),
            });
        }
    }
    if !is_hadamard_wall(&interleave[0]) {
        return Err(Error::BadFirstInterleave);
    }

    let mut c = Circuit::new(m)?;
    for (w, v) in partition.iter().zip(interleave) {
        c.append(v)?;
        let selected = w.select(b)?;
        for q in 0..m {
            if selected.get(q) {
                c.rz(q, PI)?;
            }
        }
    }
    Ok(c)
}

/// Exactly one H per qubit and nothing else.
fn is_hadamard_wall(c: &Circuit) -> bool {
    if c.len() != c.qubits() {
        return false;
    }
    let mut seen = vec![false; c.qubits()];
    for g in c.gates() {
        match g {
            Gate::H { q } if !seen[*q] => seen[*q] = true,
            _ => return false,
        }
    }
    true
}

/// Convenience: the H^⊗m wall used as the first interleave block.
pub fn hadamard_wall(m: usize) -> Result<Circuit> {
    let mut c = Circuit::new(m)?;
    for q in 0..m {
        c.h(q)?;
    }
    Ok(c)
}

/// Doubled QRAC encoder Ũ = U₃,₁(t) · R_n(π) · U₃,₁(t) with
/// n = (1,1,1)/√3, applied to |0⟩. Its model spectrum reaches every Fourier
/// basis element of 𝔹³.
pub fn double_qrac_embed(t: &Triplet) -> Result<QuantumState> {
    double_qrac_circuit(t)?.run(&[])
}

/// Circuit form of the doubled QRAC encoder.
pub fn double_qrac_circuit(t: &Triplet) -> Result<Circuit> {
    let a = QracAngles::default();
    let axis = [1.0 / 3f64.sqrt(); 3];
    let mut c = Circuit::new(1)?;
    qrac_triplet_circuit(0, t, &a, &mut c)?;
    c.rn(0, axis, PI)?;
    qrac_triplet_circuit(0, t, &a, &mut c)?;
    Ok(c)
}

/// Lexicographically ordered qubit pairs (i, j), i < j.
pub fn pair_order(m: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            pairs.push((i, j));
        }
    }
    pairs
}

/// All-to-all layer of variational SWAP gates e^{−i(β/2)SWAP}, one per
/// qubit pair in [`pair_order`]. Needs C(m,2) angles.
pub fn swap_network_layer(m: usize, betas: &[f64]) -> Result<Circuit> {
    let pairs = pair_order(m);
    if betas.len() != pairs.len() {
        return Err(Error::BadSwapLayer {
            m,
            expected: pairs.len(),
            got: betas.len(),
        });
    }
    let mut c = Circuit::new(m)?;
    for ((i, j), &beta) in pairs.into_iter().zip(betas) {
        c.swap_rot(i, j, beta)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{CMatrix, PauliSum};

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn bloch(state: &QuantumState) -> (f64, f64, f64) {
        let exp = |w: &str| {
            PauliSum::from_terms(1, &[(1.0, w)])
                .unwrap()
                .expectation(state)
                .unwrap()
        };
        (exp("X"), exp("Y"), exp("Z"))
    }

    /// Density matrix ½(I + cx·X + cy·Y + cz·Z).
    fn bloch_density(cx: f64, cy: f64, cz: f64) -> CMatrix {
        let mut m = CMatrix::zeros(2);
        m[(0, 0)] = Complex64::new(0.5 * (1.0 + cz), 0.0);
        m[(1, 1)] = Complex64::new(0.5 * (1.0 - cz), 0.0);
        m[(0, 1)] = Complex64::new(0.5 * cx, -0.5 * cy);
        m[(1, 0)] = Complex64::new(0.5 * cx, 0.5 * cy);
        m
    }

    #[test]
    fn phase_embed_plus_states() {
        let s = phase_embed(&bv("000")).unwrap();
        let scale = 1.0 / 8f64.sqrt();
        for a in s.amplitudes().unwrap() {
            assert!((a.re - scale).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn phase_embed_single_bit_is_minus() {
        let s = phase_embed(&bv("1")).unwrap();
        let (x, _, _) = bloch(&s);
        assert!((x + 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_embed_states_are_orthogonal_and_unbiased() {
        let n = 4;
        for b in BitVector::all(n) {
            let s = phase_embed(&b).unwrap();
            for a in s.amplitudes().unwrap() {
                assert!((a.norm() - 0.25).abs() < 1e-12);
            }
            for other in BitVector::all(n) {
                if other == b {
                    continue;
                }
                let o = phase_embed(&other).unwrap();
                assert!(s.overlap(&o).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_circuit_matches_direct_state_and_z_form() {
        for b in BitVector::all(3) {
            let direct = phase_embed(&b).unwrap();
            let circuit = phase_embed_circuit(&b).unwrap().run(&[]).unwrap();
            assert!((direct.overlap(&circuit).unwrap().norm() - 1.0).abs() < 1e-12);

            // Z^(b) H^⊗n form, Z as R_Z(π), equal up to global phase.
            let mut alt = Circuit::new(3).unwrap();
            for q in 0..3 {
                alt.h(q).unwrap();
            }
            for q in 0..3 {
                if b.get(q) {
                    alt.rz(q, PI).unwrap();
                }
            }
            let alt = alt.run(&[]).unwrap();
            assert!((direct.overlap(&alt).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triplet_splitting_and_padding() {
        assert_eq!(qrac_triplets(&bv("101")), vec![Triplet::bits(1, 0, 1)]);
        assert_eq!(
            qrac_triplets(&bv("1011")),
            vec![Triplet::bits(1, 0, 1), Triplet::bits(1, 0, 0)]
        );
        assert_eq!(
            qrac_triplets(&bv("110100")),
            vec![Triplet::bits(1, 1, 0), Triplet::bits(1, 0, 0)]
        );
    }

    #[test]
    fn qrac_rotation_angles() {
        let a = QracAngles::default();
        let (phi_y, phi_z) = qrac_angles_for(&Triplet::bits(0, 0, 0), &a);
        assert!((phi_z - PI / 4.0).abs() < 1e-15);
        assert!((phi_y - a.alpha2()).abs() < 1e-15);

        let (_, phi_z) = qrac_angles_for(&Triplet::bits(1, 0, 0), &a);
        assert!((phi_z - 3.0 * PI / 4.0).abs() < 1e-15);

        let (_, phi_z) = qrac_angles_for(&Triplet::bits(0, 1, 0), &a);
        assert!((phi_z + PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn qrac_bloch_vectors_at_default_angles() {
        let inv = 1.0 / 3f64.sqrt();
        let s = qrac_embed(&bv("000"), &QracAngles::default()).unwrap();
        let (x, y, z) = bloch(&s);
        assert!((x - inv).abs() < 1e-12 && (y - inv).abs() < 1e-12 && (z - inv).abs() < 1e-12);

        let s = qrac_embed(&bv("111"), &QracAngles::default()).unwrap();
        let (x, y, z) = bloch(&s);
        assert!((x + inv).abs() < 1e-12 && (y + inv).abs() < 1e-12 && (z + inv).abs() < 1e-12);

        for t in Triplet::all() {
            let b = BitVector::new(
                3,
                t.bx as u32 | (t.by as u32) << 1 | (t.bz as u32) << 2,
            )
            .unwrap();
            let (x, y, z) = bloch(&qrac_embed(&b, &QracAngles::default()).unwrap());
            for c in [x, y, z] {
                assert!((c.abs() - inv).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn qrac_circuit_reproduces_bloch_density() {
        // The two-rotation encoder matches ½(I + Σ ±P/√3) for all 8 triplets.
        let inv = 1.0 / 3f64.sqrt();
        for t in Triplet::all() {
            let b = BitVector::new(
                3,
                t.bx as u32 | (t.by as u32) << 1 | (t.bz as u32) << 2,
            )
            .unwrap();
            let state = qrac_embed(&b, &QracAngles::default()).unwrap();
            let want = bloch_density(
                if t.bx { -inv } else { inv },
                if t.by { -inv } else { inv },
                if t.bz { -inv } else { inv },
            );
            assert!(state.density().frobenius_distance(&want) < 1e-10);
        }
    }

    #[test]
    fn general_angles_match_sign_structure() {
        // Sign structure of the encoded density at arbitrary valid
        // angles, all 8 triplets.
        let a = QracAngles::new(0.9, 1.1).unwrap();
        let (cx, cy, cz) = a.components();
        for t in Triplet::all() {
            let b = BitVector::new(
                3,
                t.bx as u32 | (t.by as u32) << 1 | (t.bz as u32) << 2,
            )
            .unwrap();
            let state = qrac_embed(&b, &a).unwrap();
            let want = bloch_density(
                if t.bx { -cx } else { cx },
                if t.by { -cy } else { cy },
                if t.bz { -cz } else { cz },
            );
            assert!(state.density().frobenius_distance(&want) < 1e-10);
        }
    }

    #[test]
    fn degenerate_angles_rejected() {
        assert!(QracAngles::new(0.0, 1.0).is_err()); // sin(α₁) = 0 kills Y
        assert!(QracAngles::new(PI / 4.0, PI / 2.0).is_err()); // cos(α₂) = 0 kills Z
        assert!(QracAngles::new(0.9, 1.1).is_ok());
    }

    #[test]
    fn qrac_padding_is_invariant() {
        let short = qrac_embed(&bv("1011"), &QracAngles::default()).unwrap();
        let padded = qrac_embed(&bv("101100"), &QracAngles::default()).unwrap();
        assert_eq!(short.qubits(), 2);
        assert!((short.overlap(&padded).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn selector_examples() {
        let w = SubsetSelector::new(6, vec![1, 2, 3]).unwrap();
        assert_eq!(w.select(&bv("101101")).unwrap(), bv("101"));

        let w = SubsetSelector::new(6, vec![2, 5]).unwrap();
        assert_eq!(w.select(&bv("010010")).unwrap(), bv("11"));

        assert!(SubsetSelector::new(4, vec![2, 2]).is_err());
        assert!(SubsetSelector::new(4, vec![0, 1]).is_err());
        assert!(SubsetSelector::new(4, vec![3, 5]).is_err());
    }

    #[test]
    fn eta_then_nu_is_identity() {
        let selectors = [
            SubsetSelector::new(7, vec![1, 3, 4, 7]).unwrap(),
            SubsetSelector::new(7, vec![2, 5, 6, 7]).unwrap(),
        ];
        for w in &selectors {
            for small in BitVector::all(4) {
                let lifted = w.embed(&small).unwrap();
                assert_eq!(w.select(&lifted).unwrap(), small);
            }
        }
    }

    #[test]
    fn permutation_examples() {
        let id = Permutation::identity(4);
        assert_eq!(id.apply(&bv("0110")).unwrap(), bv("0110"));

        let swap = Permutation::new(vec![2, 1]).unwrap();
        assert_eq!(swap.apply(&bv("10")).unwrap(), bv("01"));

        assert!(Permutation::new(vec![1, 1, 3]).is_err());
        assert!(Permutation::new(vec![1, 2, 4]).is_err());
    }

    #[test]
    fn permutation_preserves_weight_and_composes() {
        let tau = Permutation::new(vec![3, 1, 4, 2]).unwrap();
        let sigma = Permutation::new(vec![2, 4, 1, 3]).unwrap();
        for b in BitVector::all(4) {
            let pb = tau.apply(&b).unwrap();
            assert_eq!(pb.weight(), b.weight());
            let lhs = sigma.apply(&tau.apply(&b).unwrap()).unwrap();
            let rhs = tau.compose(&sigma).unwrap().apply(&b).unwrap();
            assert_eq!(lhs, rhs);
        }
        let inv = tau.inverse();
        assert_eq!(tau.compose(&inv).unwrap(), Permutation::identity(4));
        assert_eq!(Permutation::all(3).len(), 6);
    }

    #[test]
    fn repeated_embed_single_step_reduces_to_phase_embed() {
        let b = bv("10110");
        let w = SubsetSelector::new(5, vec![1, 3, 4]).unwrap();
        let c =
            repeated_phase_embed(&b, std::slice::from_ref(&w), &[hadamard_wall(3).unwrap()])
                .unwrap();
        let got = c.run(&[]).unwrap();
        let want = phase_embed(&w.select(&b).unwrap()).unwrap();
        assert!((got.overlap(&want).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_embed_identity_interleave_merges_encodings() {
        // With V₂ = I the two Z layers fuse into one phase embedding of
        // ν₁(b) ⊕ ν₂(b), so the model spectrum can only touch masks of the
        // form η₁(u) ⊕ η₂(u).
        let partition = [
            SubsetSelector::new(4, vec![1, 2]).unwrap(),
            SubsetSelector::new(4, vec![3, 4]).unwrap(),
        ];
        let interleave = [hadamard_wall(2).unwrap(), Circuit::new(2).unwrap()];
        let o = crate::qsim::DenseObservable::random(2, 321).unwrap();
        let table = crate::bitfourier::FunctionTable::from_fn(4, |b| {
            let c = repeated_phase_embed(&b, &partition, &interleave).unwrap();
            o.expectation(&c.run(&[]).unwrap()).unwrap()
        })
        .unwrap();
        let spec = crate::bitfourier::wht_forward(&table);
        let allowed: Vec<BitVector> = BitVector::all(2)
            .map(|u| {
                partition[0]
                    .embed(&u)
                    .unwrap()
                    .xor(&partition[1].embed(&u).unwrap())
                    .unwrap()
            })
            .collect();
        for (s, c) in spec.iter() {
            assert!(allowed.contains(&s), "stray mask {s} with coefficient {c}");
        }
    }

    #[test]
    fn repeated_embed_enforces_hadamard_first() {
        let b = bv("1011");
        let w1 = SubsetSelector::new(4, vec![1, 2]).unwrap();
        let w2 = SubsetSelector::new(4, vec![3, 4]).unwrap();
        let bad = crate::qsim::random_circuit(2, 1, 0).unwrap();
        let err = repeated_phase_embed(
            &b,
            &[w1.clone(), w2.clone()],
            &[bad.clone(), bad.clone()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::BadFirstInterleave));

        let ok = repeated_phase_embed(&b, &[w1.clone(), w2.clone()], &[hadamard_wall(2).unwrap(), bad]);
        assert!(ok.is_ok());

        // Interleave blocks are fixed circuits.
        let mut trainable = Circuit::new(2).unwrap();
        trainable.ry(0, crate::qsim::Param::Free(0)).unwrap();
        let err = repeated_phase_embed(&b, &[w1, w2], &[hadamard_wall(2).unwrap(), trainable]);
        assert!(matches!(err, Err(Error::ParameterCount { .. })));
    }

    #[test]
    fn double_qrac_is_pure_and_injective_on_extremes() {
        for t in Triplet::all() {
            let s = double_qrac_embed(&t).unwrap();
            assert!((s.purity() - 1.0).abs() < 1e-12);
        }
        let a = double_qrac_embed(&Triplet::bits(0, 0, 0)).unwrap();
        let b = double_qrac_embed(&Triplet::bits(1, 1, 1)).unwrap();
        let fidelity = a.overlap(&b).unwrap().norm_sqr();
        assert!(fidelity < 1.0 - 1e-6);
    }

    #[test]
    fn swap_layer_identity_and_full_swap() {
        let c = swap_network_layer(3, &[0.0; 3]).unwrap();
        let u = c.unitary(&[]).unwrap();
        assert!(u.frobenius_distance(&CMatrix::identity(8)) < 1e-12);

        // β = π on pair (1,2) routes |10⟩ to |01⟩ up to phase.
        let mut betas = [0.0; 3];
        betas[0] = PI; // pair_order(3) starts with (0, 1)
        let c = swap_network_layer(3, &betas).unwrap();
        let mut input = Circuit::new(3).unwrap();
        input.x(0).unwrap();
        let mut state = input.run(&[]).unwrap();
        if let QuantumState::Pure { amps, .. } = &mut state {
            c.apply(amps, &[]).unwrap();
            let probs: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
            assert!((probs[0b010] - 1.0).abs() < 1e-12);
        } else {
            unreachable!();
        }

        assert!(swap_network_layer(3, &[0.0; 2]).is_err());
    }
}
