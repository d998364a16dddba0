//! Sparse Pauli-sum observables.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qsim::matrix::CMatrix;
use crate::qsim::state::QuantumState;

/// One single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(PauliOp::I),
            'X' => Ok(PauliOp::X),
            'Y' => Ok(PauliOp::Y),
            'Z' => Ok(PauliOp::Z),
            _ => Err(Error::BadPauliChar { c }),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let (o, l, i) = (Complex64::ZERO, Complex64::ONE, Complex64::I);
        match self {
            PauliOp::I => [[l, o], [o, l]],
            PauliOp::X => [[o, l], [l, o]],
            PauliOp::Y => [[o, -i], [i, o]],
            PauliOp::Z => [[l, o], [o, -l]],
        }
    }
}

/// A tensor word of Pauli factors, index 0 acting on qubit 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord(pub Vec<PauliOp>);

impl PauliWord {
    pub fn identity(m: usize) -> Self {
        PauliWord(vec![PauliOp::I; m])
    }

    /// Parse from text with the qubit-0 factor leftmost, e.g. `"XZ"`.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars().map(PauliOp::from_char).collect::<Result<Vec<_>>>().map(PauliWord)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of non-identity factors |P|.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&p| p != PauliOp::I).count()
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.iter().all(|&p| matches!(p, PauliOp::I | PauliOp::Z))
    }

    /// Apply the word to a computational basis index: P|j⟩ = phase·|j ⊕ flip⟩.
    /// Returns (flipped index, phase).
    pub fn act_on_basis(&self, j: usize) -> (usize, Complex64) {
        let mut out = j;
        let mut phase = Complex64::ONE;
        for (q, &p) in self.0.iter().enumerate() {
            let bit = j >> q & 1;
            match p {
                PauliOp::I => {}
                PauliOp::X => out ^= 1 << q,
                PauliOp::Y => {
                    out ^= 1 << q;
                    // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                    phase *= if bit == 0 { Complex64::I } else { -Complex64::I };
                }
                PauliOp::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (out, phase)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

/// A real linear combination of Pauli words on `m` qubits. Real weights make
/// the represented operator Hermitian; duplicate words are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    m: usize,
    terms: BTreeMap<PauliWord, f64>,
}

impl PauliSum {
    pub fn new(m: usize) -> Self {
        PauliSum {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut s = Self::new(m);
        s.add(1.0, PauliWord::identity(m)).expect("length matches");
        s
    }

    /// Z on every qubit: the default diagonal observable Z^⊗m.
    pub fn z_all(m: usize) -> Self {
        let mut s = Self::new(m);
        s.add(1.0, PauliWord(vec![PauliOp::Z; m])).expect("length matches");
        s
    }

    /// Add `weight · word`, merging duplicates.
    pub fn add(&mut self, weight: f64, word: PauliWord) -> Result<()> {
        if word.len() != self.m {
            return Err(Error::LengthMismatch {
                left: self.m,
                right: word.len(),
            });
        }
        let w = self.terms.entry(word).or_insert(0.0);
        *w += weight;
        Ok(())
    }

    /// Add a term from text, e.g. `add_str(0.5, "XI")`.
    pub fn add_str(&mut self, weight: f64, word: &str) -> Result<()> {
        self.add(weight, PauliWord::parse(word)?)
    }

    pub fn from_terms(m: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let mut s = Self::new(m);
        for (w, word) in terms {
            s.add_str(*w, word)?;
        }
        Ok(s)
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    /// Terms with nonzero weight, in word order.
    pub fn terms(&self) -> impl Iterator<Item = (&PauliWord, f64)> {
        self.terms.iter().filter(|(_, &w)| w != 0.0).map(|(p, &w)| (p, w))
    }

    pub fn weight_of(&self, word: &PauliWord) -> f64 {
        self.terms.get(word).copied().unwrap_or(0.0)
    }

    /// True when every term is built from I and Z only.
    pub fn is_diagonal(&self) -> bool {
        self.terms().all(|(w, _)| w.is_diagonal())
    }

    /// Eigenvalue of a diagonal sum on basis state |j⟩.
    pub fn diagonal_value(&self, j: usize) -> Result<f64> {
        let mut total = 0.0;
        for (word, w) in self.terms() {
            if !word.is_diagonal() {
                return Err(Error::NotDiagonal {
                    word: word.to_string(),
                });
            }
            let mut sign = 1.0;
            for (q, &p) in word.0.iter().enumerate() {
                if p == PauliOp::Z && j >> q & 1 == 1 {
                    sign = -sign;
                }
            }
            total += w * sign;
        }
        Ok(total)
    }

    /// ⟨ψ|Σ wP|ψ⟩ or Tr[(Σ wP)ρ]; exact.
    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        if state.qubits() != self.m {
            return Err(Error::DimensionMismatch {
                left: 1 << self.m,
                right: state.dim(),
            });
        }
        let mut total = Complex64::ZERO;
        match state {
            QuantumState::Pure { amps, .. } => {
                for (word, w) in self.terms() {
                    let mut acc = Complex64::ZERO;
                    for (j, amp) in amps.iter().enumerate() {
                        if *amp == Complex64::ZERO {
                            continue;
                        }
                        let (k, phase) = word.act_on_basis(j);
                        acc += amps[k].conj() * phase * amp;
                    }
                    total += acc * w;
                }
            }
            QuantumState::Density { rho, .. } => {
                // Tr[Pρ] = Σ_j phase_j · ρ[j, σ(j)] with P|j⟩ = phase_j|σ(j)⟩.
                for (word, w) in self.terms() {
                    let mut acc = Complex64::ZERO;
                    for j in 0..rho.dim() {
                        let (k, phase) = word.act_on_basis(j);
                        acc += phase * rho[(j, k)];
                    }
                    total += acc * w;
                }
            }
        }
        if total.im.abs() >= 1e-9 {
            return Err(Error::ImaginaryResidue { imag: total.im });
        }
        Ok(total.re)
    }

    /// Dense matrix Σ w · (⊗ of 2x2 factors); capped at 12 qubits.
    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.m > 12 {
            return Err(Error::BadQubitCount { m: self.m, max: 12 });
        }
        let dim = 1usize << self.m;
        let mut out = CMatrix::zeros(dim);
        for (word, w) in self.terms() {
            for j in 0..dim {
                let (k, phase) = word.act_on_basis(j);
                // Column j of the word's matrix has its entry at row k.
                out[(k, j)] += phase * w;
            }
        }
        Ok(out)
    }
}
