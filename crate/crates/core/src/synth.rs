//! Constructive observable synthesis and ensemble decomposition.
//!
//! Given a target spectrum ĝ, this module builds observables whose model
//! output Tr[O ρ(b)] reproduces g exactly on every input:
//!
//! - phase embedding: the matrix with entries O_{k,j} = ĝ(k⊕j) works for any
//!   g on 𝔹ⁿ ([`synth_phase_obs`]);
//! - QRAC embedding: O = Σ_P 3^{|P|/2} ĝ(Φ(P)) P works whenever the support
//!   of ĝ lies in the per-triplet-weight-≤1 mask set 𝒦^QE
//!   ([`synth_qrac_obs`]), or in a permuted copy of it
//!   ([`synth_qrac_permuted`]);
//! - ensembles of small models cover low-degree targets beyond a single
//!   model's reach: bit-subset members on d qubits for any degree-d function
//!   ([`ensemble_phase`]), permutation members for degree ≤ ⌈n/3⌉
//!   ([`ensemble_qrac`]).
//!
//! The reverse direction — reading a model's spectrum off its observable —
//! is [`model_spectrum_phase`] / [`model_spectrum_qrac`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bitfourier::{degree, BitVector, FourierSpectrum};
use crate::embed::{
    embedded_state, EmbeddingKind, Permutation, SubsetSelector,
};
use crate::error::{Error, Result};
use crate::qsim::{
    CMatrix, DenseObservable, Observable, PauliOp, PauliSum, PauliWord,
};
use crate::util::binomial;

/// All masks s ∈ 𝔹^{3m} with at most one set bit per triplet — exactly the
/// Fourier supports a single QRAC model reaches. |masks| = 4^m.
#[derive(Clone, Debug, PartialEq)]
pub struct KqeSet {
    m: usize,
    masks: Vec<BitVector>,
}

impl KqeSet {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Masks in ascending integer order (b₁ at bit 0).
    pub fn masks(&self) -> &[BitVector] {
        &self.masks
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: &BitVector) -> bool {
        s.len() == 3 * self.m && mask_in_kqe(s.mask(), self.m)
    }
}

fn mask_in_kqe(mask: u32, m: usize) -> bool {
    (0..m).all(|i| (mask >> (3 * i) & 0b111).count_ones() <= 1)
}

/// Enumerate 𝒦^QE_m in ascending mask order; capped at m = 8 (4^8 masks).
pub fn kqe_set(m: usize) -> Result<KqeSet> {
    if m == 0 || m > 8 {
        return Err(Error::BadQubitCount { m, max: 8 });
    }
    let mut raw: Vec<u32> = Vec::with_capacity(1 << (2 * m));
    // One choice of {none, X, Y, Z} position per triplet.
    for code in 0..1u32 << (2 * m) {
        let mut mask = 0u32;
        for i in 0..m {
            match code >> (2 * i) & 3 {
                0 => {}
                c => mask |= 1 << (3 * i + c as usize - 1),
            }
        }
        raw.push(mask);
    }
    raw.sort_unstable();
    let masks = raw
        .into_iter()
        .map(|bits| BitVector::new(3 * m, bits))
        .collect::<Result<_>>()?;
    Ok(KqeSet { m, masks })
}

/// Φ: the bijection from m-qubit Pauli words onto 𝒦^QE_m. Factor i maps to
/// a 1 in triplet position 3i, 3i+1, or 3i+2 for X, Y, or Z.
pub fn phi_map(word: &PauliWord) -> Result<BitVector> {
    let m = word.len();
    let mut bits = 0u32;
    for (i, &p) in word.0.iter().enumerate() {
        match p {
            PauliOp::I => {}
            PauliOp::X => bits |= 1 << (3 * i),
            PauliOp::Y => bits |= 1 << (3 * i + 1),
            PauliOp::Z => bits |= 1 << (3 * i + 2),
        }
    }
    BitVector::new(3 * m, bits)
}

/// Φ⁻¹: rejects masks outside 𝒦^QE_m.
pub fn phi_inv(s: &BitVector) -> Result<PauliWord> {
    if !s.len().is_multiple_of(3) {
        return Err(Error::BadBitLength {
            n: s.len(),
            max: crate::bitfourier::MAX_BITS,
        });
    }
    let m = s.len() / 3;
    let mut ops = Vec::with_capacity(m);
    for i in 0..m {
        let triplet = s.mask() >> (3 * i) & 0b111;
        let op = match triplet {
            0b000 => PauliOp::I,
            0b001 => PauliOp::X,
            0b010 => PauliOp::Y,
            0b100 => PauliOp::Z,
            _ => {
                return Err(Error::SupportOutsideKqe {
                    mask: s.to_string(),
                })
            }
        };
        ops.push(op);
    }
    Ok(PauliWord(ops))
}

/// Observable for the phase embedding with entries O_{k,j} = ĝ(k⊕j);
/// real symmetric, and Tr[O ρ_PE(b)] = g(b) on every input.
pub fn synth_phase_obs(spec: &FourierSpectrum) -> Result<DenseObservable> {
    let n = spec.n();
    if n > 12 {
        return Err(Error::BadQubitCount { m: n, max: 12 });
    }
    let dim = 1usize << n;
    let mut dense = vec![0.0f64; dim];
    for (s, c) in spec.iter() {
        dense[s.mask() as usize] = c;
    }
    let matrix = CMatrix::from_fn(dim, |k, j| Complex64::new(dense[k ^ j], 0.0));
    DenseObservable::new(n, matrix)
}

/// Model spectrum of a phase-embedding observable:
/// f̂(s) = 2⁻ⁿ Σ_{k⊕j=s} O_{k,j}. Left inverse of [`synth_phase_obs`].
pub fn model_spectrum_phase(o: &DenseObservable) -> Result<FourierSpectrum> {
    let n = o.qubits();
    let dim = 1usize << n;
    let mut spec = FourierSpectrum::empty(n)?;
    let scale = 1.0 / dim as f64;
    for s in 0..dim {
        // Hermiticity pairs (k, k⊕s) with (k⊕s, k), cancelling imaginary
        // parts; keep the real part.
        let mut acc = 0.0;
        for k in 0..dim {
            acc += o.matrix()[(k, k ^ s)].re;
        }
        spec.insert(&BitVector::new(n, s as u32)?, acc * scale)?;
    }
    Ok(spec)
}

fn pow3_half(support: usize) -> f64 {
    3f64.sqrt().powi(support as i32)
}

/// Zero-extend an n-bit mask to the padded 3m-bit input space.
fn pad_mask(s: &BitVector, m: usize) -> Result<BitVector> {
    BitVector::new(3 * m, s.mask())
}

/// Observable for the QRAC embedding, O = Σ_P 3^{|P|/2} ĝ(Φ(P)) P, defined
/// when every support mask of ĝ sits in 𝒦^QE (after zero-padding to 3m
/// bits). Then Tr[O ρ_QE(b)] = g(b) for all b ∈ 𝔹ⁿ.
pub fn synth_qrac_obs(spec: &FourierSpectrum) -> Result<PauliSum> {
    let m = spec.n().div_ceil(3);
    let mut sum = PauliSum::new(m);
    for (s, c) in spec.iter() {
        let padded = pad_mask(&s, m)?;
        if !mask_in_kqe(padded.mask(), m) {
            return Err(Error::SupportOutsideKqe {
                mask: s.to_string(),
            });
        }
        let word = phi_inv(&padded)?;
        sum.add(pow3_half(word.support_size()) * c, word)?;
    }
    Ok(sum)
}

/// Model spectrum of a QRAC-embedding observable over the padded cube
/// 𝔹^{3m}: f̂(s) = Tr[O Φ⁻¹(s)] / (2^m 3^{|Φ⁻¹(s)|/2}) for s ∈ 𝒦^QE_m; every
/// other Boolean-Fourier coefficient of the model is zero.
pub fn model_spectrum_qrac(o: &Observable, m: usize) -> Result<FourierSpectrum> {
    let mut spec = FourierSpectrum::empty(3 * m)?;
    let norm = (1u64 << m) as f64;
    match o {
        Observable::Pauli(p) => {
            if p.qubits() != m {
                return Err(Error::DimensionMismatch {
                    left: m,
                    right: p.qubits(),
                });
            }
            // Tr[O P] = 2^m · weight(P) once duplicates are merged.
            for s in kqe_set(m)?.masks() {
                let word = phi_inv(s)?;
                let tr = norm * p.weight_of(&word);
                spec.insert(s, tr / (norm * pow3_half(word.support_size())))?;
            }
        }
        Observable::Dense(d) => {
            if d.qubits() != m {
                return Err(Error::DimensionMismatch {
                    left: m,
                    right: d.qubits(),
                });
            }
            for s in kqe_set(m)?.masks() {
                let word = phi_inv(s)?;
                // Tr[O P] = Σ_j phase_j · O[j, σ(j)] with P|j⟩ = phase_j|σ(j)⟩.
                let mut tr = Complex64::ZERO;
                for j in 0..1usize << m {
                    let (k, phase) = word.act_on_basis(j);
                    tr += phase * d.matrix()[(j, k)];
                }
                if tr.im.abs() >= 1e-9 {
                    return Err(Error::ImaginaryResidue { imag: tr.im });
                }
                spec.insert(s, tr.re / (norm * pow3_half(word.support_size())))?;
            }
        }
    }
    Ok(spec)
}

/// Collapse a spectrum over the padded cube 𝔹^{3m} back to 𝔹ⁿ. Padding bits
/// are always zero, so χ factors on them are constant 1 and their masks fold
/// onto the truncation.
pub fn restrict_padded(spec: &FourierSpectrum, n: usize) -> Result<FourierSpectrum> {
    if n > spec.n() {
        return Err(Error::LengthMismatch {
            left: spec.n(),
            right: n,
        });
    }
    let mut out = FourierSpectrum::empty(n)?;
    let low = (1u32 << n) - 1;
    for (s, c) in spec.iter() {
        let key = BitVector::new(n, s.mask() & low)?;
        out.insert(&key, out.get(&key) + c)?;
    }
    Ok(out)
}

/// Observable for the τ-permuted QRAC model: requires every support mask s
/// to satisfy τ(s) ∈ 𝒦^QE, and then Tr[O ρ_QE(τ(b))] = g(b) for all b.
pub fn synth_qrac_permuted(
    spec: &FourierSpectrum,
    tau: &Permutation,
) -> Result<(Permutation, PauliSum)> {
    if tau.n() != spec.n() {
        return Err(Error::LengthMismatch {
            left: spec.n(),
            right: tau.n(),
        });
    }
    let m = spec.n().div_ceil(3);
    let mut sum = PauliSum::new(m);
    for (s, c) in spec.iter() {
        let moved = pad_mask(&tau.apply(&s)?, m)?;
        if !mask_in_kqe(moved.mask(), m) {
            return Err(Error::SupportOutsideKqe {
                mask: s.to_string(),
            });
        }
        let word = phi_inv(&moved)?;
        sum.add(pow3_half(word.support_size()) * c, word)?;
    }
    Ok((tau.clone(), sum))
}

/// Classical input preprocessor attached to an ensemble member.
#[derive(Clone, Debug, PartialEq)]
pub enum Preprocessor {
    Subset(SubsetSelector),
    Permute(Permutation),
}

impl Preprocessor {
    pub fn apply(&self, b: &BitVector) -> Result<BitVector> {
        match self {
            Preprocessor::Subset(w) => w.select(b),
            Preprocessor::Permute(tau) => tau.apply(b),
        }
    }
}

/// One linear quantum model inside an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMember {
    pub preprocessor: Preprocessor,
    pub observable: Observable,
}

/// A classical ensemble of linear quantum models: the sum of member outputs,
/// each member embedding its own preprocessed input.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleModel {
    n: usize,
    embedding: EmbeddingKind,
    members: Vec<EnsembleMember>,
}

impl EnsembleModel {
    pub fn new(n: usize, embedding: EmbeddingKind, members: Vec<EnsembleMember>) -> Self {
        Self {
            n,
            embedding,
            members,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn embedding(&self) -> EmbeddingKind {
        self.embedding
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    /// Σ over members of Tr[O^(i) ρ(φ_i(b))]. Member order fixes the
    /// floating-point summation order.
    pub fn eval(&self, b: &BitVector) -> Result<f64> {
        if b.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: b.len(),
            });
        }
        let mut total = 0.0;
        for member in &self.members {
            let input = member.preprocessor.apply(b)?;
            let state = embedded_state(self.embedding, &input)?;
            total += member.observable.expectation(&state)?;
        }
        Ok(total)
    }

    /// JSON document `{n, embedding, members: [{preprocessor, pauli_terms |
    /// matrix}]}` with one-based selector/permutation indices.
    pub fn to_json(&self) -> String {
        let doc = EnsembleDoc {
            n: self.n,
            embedding: self.embedding,
            members: self
                .members
                .iter()
                .map(|mem| {
                    let preprocessor = match &mem.preprocessor {
                        Preprocessor::Subset(w) => PreprocessorDoc::Subset(w.indices().to_vec()),
                        Preprocessor::Permute(t) => {
                            PreprocessorDoc::Permutation(t.map().to_vec())
                        }
                    };
                    match &mem.observable {
                        Observable::Pauli(p) => MemberDoc {
                            preprocessor,
                            pauli_terms: Some(
                                p.terms().map(|(w, c)| (c, w.to_string())).collect(),
                            ),
                            matrix: None,
                        },
                        Observable::Dense(d) => {
                            let dim = d.matrix().dim();
                            let rows = (0..dim)
                                .map(|i| {
                                    (0..dim)
                                        .map(|j| {
                                            let z = d.matrix()[(i, j)];
                                            [z.re, z.im]
                                        })
                                        .collect()
                                })
                                .collect();
                            MemberDoc {
                                preprocessor,
                                pauli_terms: None,
                                matrix: Some(rows),
                            }
                        }
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EnsembleDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let members = doc
            .members
            .into_iter()
            .map(|mem| {
                let preprocessor = match mem.preprocessor {
                    PreprocessorDoc::Subset(indices) => {
                        Preprocessor::Subset(SubsetSelector::new(doc.n, indices)?)
                    }
                    PreprocessorDoc::Permutation(map) => {
                        Preprocessor::Permute(Permutation::new(map)?)
                    }
                };
                let observable = match (mem.pauli_terms, mem.matrix) {
                    (Some(terms), None) => {
                        let m = terms
                            .first()
                            .map(|(_, w)| w.len())
                            .ok_or_else(|| Error::Parse("member with no terms".into()))?;
                        let mut sum = PauliSum::new(m);
                        for (c, w) in terms {
                            sum.add(c, PauliWord::parse(&w)?)?;
                        }
                        Observable::Pauli(sum)
                    }
                    (None, Some(rows)) => {
                        let dim = rows.len();
                        let m = dim.trailing_zeros() as usize;
                        if dim == 0 || dim != 1 << m {
                            return Err(Error::Parse(format!(
                                "matrix dimension {dim} is not a power of two"
                            )));
                        }
                        let matrix = CMatrix::from_rows(
                            rows.into_iter()
                                .map(|r| {
                                    r.into_iter()
                                        .map(|[re, im]| Complex64::new(re, im))
                                        .collect()
                                })
                                .collect(),
                        )?;
                        Observable::Dense(DenseObservable::new(m, matrix)?)
                    }
                    _ => {
                        return Err(Error::Parse(
                            "member needs exactly one of pauli_terms or matrix".into(),
                        ))
                    }
                };
                Ok(EnsembleMember {
                    preprocessor,
                    observable,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(doc.n, doc.embedding, members))
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleDoc {
    n: usize,
    embedding: EmbeddingKind,
    members: Vec<MemberDoc>,
}

#[derive(Serialize, Deserialize)]
struct MemberDoc {
    preprocessor: PreprocessorDoc,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pauli_terms: Option<Vec<(f64, String)>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PreprocessorDoc {
    Subset(Vec<usize>),
    Permutation(Vec<usize>),
}

/// Evaluate an ensemble at one input.
pub fn ensemble_eval(e: &EnsembleModel, b: &BitVector) -> Result<f64> {
    e.eval(b)
}

/// Multiplicity k_s: how many d-subsets w of `[n]` contain supp(s). The
/// component ĝ(s)/k_s then appears exactly k_s times across members.
pub fn phase_multiplicity(n: usize, d: usize, s: &BitVector) -> u64 {
    let wt = s.weight() as usize;
    if wt > d {
        return 0;
    }
    binomial(n - wt, d - wt)
}

/// Ensemble of C(n,d) phase-embedding models on d qubits reproducing any
/// degree-≤d target exactly. Members whose component spectrum is empty are
/// dropped.
pub fn ensemble_phase(spec: &FourierSpectrum, d: usize) -> Result<EnsembleModel> {
    use itertools::Itertools;

    let n = spec.n();
    if d == 0 || d > n {
        return Err(Error::DegreeTooHigh {
            degree: d,
            limit: n,
        });
    }
    let deg = degree(spec);
    if deg > d {
        return Err(Error::DegreeTooHigh {
            degree: deg,
            limit: d,
        });
    }

    let mut members = Vec::new();
    for indices in (1..=n).combinations(d) {
        let w = SubsetSelector::new(n, indices)?;
        let w_mask: u32 = w.indices().iter().map(|&i| 1u32 << (i - 1)).sum();
        let mut component = FourierSpectrum::empty(d)?;
        for (s, c) in spec.iter() {
            if s.mask() & !w_mask != 0 {
                continue;
            }
            let k = phase_multiplicity(n, d, &s) as f64;
            component.insert(&w.select(&s)?, c / k)?;
        }
        if component.is_empty() {
            continue;
        }
        members.push(EnsembleMember {
            preprocessor: Preprocessor::Subset(w),
            observable: Observable::Dense(synth_phase_obs(&component)?),
        });
    }
    Ok(EnsembleModel::new(n, EmbeddingKind::Phase, members))
}

/// Multiplicity k_s for the permutation ensemble: the number of τ ∈ 𝒮_n
/// with τ(s) ∈ 𝒦^QE (zero-padded), counted by direct enumeration.
fn qrac_multiplicities(
    spec: &FourierSpectrum,
    taus: &[Permutation],
    m: usize,
) -> Result<Vec<(BitVector, f64, u64)>> {
    let mut out = Vec::new();
    for (s, c) in spec.iter() {
        let k = taus
            .iter()
            .filter(|tau| {
                let moved = tau.apply(&s).expect("same length");
                mask_in_kqe(moved.mask(), m)
            })
            .count() as u64;
        out.push((s, c, k));
    }
    Ok(out)
}

/// Ensemble over all τ ∈ 𝒮_n of permuted QRAC models on ⌈n/3⌉ qubits,
/// exact for any target of degree ≤ ⌈n/3⌉. Enumeration of 𝒮_n caps n at 7.
pub fn ensemble_qrac(spec: &FourierSpectrum) -> Result<EnsembleModel> {
    let n = spec.n();
    if n > 7 {
        return Err(Error::BadBitLength { n, max: 7 });
    }
    let m = n.div_ceil(3);
    let deg = degree(spec);
    if deg > m {
        return Err(Error::DegreeTooHigh {
            degree: deg,
            limit: m,
        });
    }

    let taus = Permutation::all(n);
    let terms = qrac_multiplicities(spec, &taus, m)?;
    debug_assert!(terms.iter().all(|(_, _, k)| *k > 0));

    let mut members = Vec::new();
    for tau in &taus {
        let mut sum = PauliSum::new(m);
        let mut nonzero = false;
        for (s, c, k) in &terms {
            let moved = pad_mask(&tau.apply(s)?, m)?;
            if !mask_in_kqe(moved.mask(), m) {
                continue;
            }
            let word = phi_inv(&moved)?;
            sum.add(pow3_half(word.support_size()) * c / *k as f64, word)?;
            nonzero = true;
        }
        if !nonzero {
            continue;
        }
        members.push(EnsembleMember {
            preprocessor: Preprocessor::Permute(tau.clone()),
            observable: Observable::Pauli(sum),
        });
    }
    Ok(EnsembleModel::new(n, EmbeddingKind::Qrac, members))
}
