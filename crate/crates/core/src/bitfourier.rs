//! Fourier analysis of real-valued functions on the Boolean cube.
//!
//! A function g: 𝔹ⁿ → ℝ is stored as a dense table of 2ⁿ values. The parity
//! functions χ_s(b) = (−1)^{s·b} form an orthonormal basis under the
//! normalized inner product ⟨f, g⟩ = 2⁻ⁿ Σ_b f(b)g(b), giving the transform
//! pair
//!
//! ```text
//! ĝ(s) = ⟨g, χ_s⟩ = 2⁻ⁿ Σ_b g(b)(−1)^{s·b},      g(b) = Σ_s ĝ(s)χ_s(b).
//! ```
//!
//! Both directions run through the in-place fast Walsh–Hadamard butterfly;
//! the 2⁻ⁿ normalization sits on the analysis side only.
//!
//! Bit convention: variable b₁ occupies the least-significant mask bit, and
//! masks print with b₁ leftmost. All cross-module index math relies on this.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::util::{binomial, fmt_f64};

/// Largest supported cube dimension; 2²⁴ f64 values is the table ceiling.
pub const MAX_BITS: usize = 24;

/// Coefficients with magnitude below this are dropped from sparse spectra
/// (double-precision noise floor after 2ⁿ-term sums at n <= 24).
pub const SPARSITY_EPS: f64 = 1e-12;

/// An element of 𝔹ⁿ: an input point b or a spectral index s.
///
/// Position i (zero-based) of the mask stores variable b_{i+1}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    n: usize,
    bits: u32,
}

impl BitVector {
    /// Wrap a raw mask. Fails if `n` is out of `1..=MAX_BITS` or `bits` has
    /// stray bits beyond position `n`.
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::BadBitLength { n, max: MAX_BITS });
        }
        if bits >> n != 0 {
            return Err(Error::StrayBits { n, bits });
        }
        Ok(Self { n, bits })
    }

    /// The all-zero vector of length `n`.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Raw mask with b₁ at bit 0.
    pub fn mask(&self) -> u32 {
        self.bits
    }

    /// Value of variable b_{i+1} (zero-based position `i`).
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.bits >> i & 1 == 1
    }

    /// Hamming weight wt(·).
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Scalar product s·b = Σ sᵢbᵢ.
    pub fn dot(&self, other: &Self) -> Result<u32> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok((self.bits & other.bits).count_ones())
    }

    /// Bitwise XOR of two equal-length vectors.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(Self {
            n: self.n,
            bits: self.bits ^ other.bits,
        })
    }

    /// One-based indices of the set bits.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i)).map(|i| i + 1).collect()
    }

    /// Iterate over all 2ⁿ vectors of length `n` in ascending mask order.
    pub fn all(n: usize) -> impl Iterator<Item = BitVector> {
        debug_assert!((1..=MAX_BITS).contains(&n));
        (0u32..1 << n).map(move |bits| BitVector { n, bits })
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parse from binary text with b₁ leftmost, e.g. `"101"`.
    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_BITS {
            return Err(Error::BadBitLength { n, max: MAX_BITS });
        }
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => return Err(Error::Parse(format!("invalid mask character '{c}'"))),
            }
        }
        Ok(Self { n, bits })
    }
}

/// Dense table of a function g: 𝔹ⁿ → ℝ, indexed by mask.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTable {
    n: usize,
    values: Vec<f64>,
}

impl FunctionTable {
    /// Wrap 2ⁿ finite values.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::BadBitLength { n, max: MAX_BITS });
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(Error::BadTableSize {
                n,
                expected,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { n, values })
    }

    /// Tabulate `f` on the full cube.
    pub fn from_fn(n: usize, mut f: impl FnMut(BitVector) -> f64) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::BadBitLength { n, max: MAX_BITS });
        }
        let values: Vec<f64> = BitVector::all(n).map(&mut f).collect();
        Self::new(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, b: &BitVector) -> f64 {
        debug_assert_eq!(b.n, self.n);
        self.values[b.bits as usize]
    }

    /// CSV with columns `mask_binary,value`, one row per input, b₁ leftmost.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mask_binary,value\n");
        for b in BitVector::all(self.n) {
            out.push_str(&format!("{b},{}\n", fmt_f64(self.values[b.bits as usize])));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_mask_value_csv(text)?;
        let n = rows
            .first()
            .map(|(b, _)| b.len())
            .ok_or_else(|| Error::Parse("empty table".into()))?;
        let mut values = vec![f64::NAN; 1 << n];
        for (b, v) in rows {
            if b.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: b.len(),
                });
            }
            values[b.mask() as usize] = v;
        }
        Self::new(n, values)
    }
}

/// Sparse Fourier spectrum: mask s → coefficient ĝ(s).
///
/// Entries with |ĝ(s)| < [`SPARSITY_EPS`] are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FourierSpectrum {
    n: usize,
    coeffs: BTreeMap<u32, f64>,
}

impl FourierSpectrum {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::BadBitLength { n, max: MAX_BITS });
        }
        Ok(Self {
            n,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn from_terms(n: usize, terms: &[(BitVector, f64)]) -> Result<Self> {
        let mut spec = Self::empty(n)?;
        for (s, c) in terms {
            spec.insert(s, *c)?;
        }
        Ok(spec)
    }

    /// Set ĝ(s) = c, dropping the entry when |c| < [`SPARSITY_EPS`].
    pub fn insert(&mut self, s: &BitVector, c: f64) -> Result<()> {
        if s.n != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: s.n,
            });
        }
        if c.abs() < SPARSITY_EPS {
            self.coeffs.remove(&s.bits);
        } else {
            self.coeffs.insert(s.bits, c);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of χ_s (zero when absent).
    pub fn get(&self, s: &BitVector) -> f64 {
        debug_assert_eq!(s.n, self.n);
        self.coeffs.get(&s.bits).copied().unwrap_or(0.0)
    }

    /// Stored terms in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = (BitVector, f64)> + '_ {
        self.coeffs.iter().map(|(&bits, &c)| {
            (
                BitVector {
                    n: self.n,
                    bits,
                },
                c,
            )
        })
    }

    /// Evaluate g(b) = Σ_s ĝ(s)χ_s(b) straight from the sparse terms.
    pub fn evaluate(&self, b: &BitVector) -> Result<f64> {
        if b.n != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: b.n,
            });
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(&s, &c)| {
                if (s & b.bits).count_ones() & 1 == 1 {
                    -c
                } else {
                    c
                }
            })
            .sum())
    }

    /// Squared ℓ₂ norm Σ_s ĝ(s)², which Parseval ties to ⟨g, g⟩.
    pub fn power(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum()
    }

    /// CSV with columns `mask_binary,value`, nonzero terms only, ascending
    /// mask order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mask_binary,value\n");
        for (s, c) in self.iter() {
            out.push_str(&format!("{s},{}\n", fmt_f64(c)));
        }
        out
    }

    /// Parse the [`FourierSpectrum::to_csv`] format. The width n is read off
    /// the first data row, so a header-only document cannot be parsed.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_mask_value_csv(text)?;
        let n = rows
            .first()
            .map(|(b, _)| b.len())
            .ok_or_else(|| Error::Parse("empty spectrum".into()))?;
        Self::from_terms(n, &rows)
    }
}

fn parse_mask_value_csv(text: &str) -> Result<Vec<(BitVector, f64)>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("mask_binary")) {
            continue;
        }
        let (mask, value) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected mask,value", lineno + 1)))?;
        let b: BitVector = mask.trim().parse()?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        rows.push((b, v));
    }
    Ok(rows)
}

/// χ_s(b) = ∏_{i: sᵢ=1} (−1)^{bᵢ} = (−1)^{s·b}.
pub fn parity_chi(s: &BitVector, b: &BitVector) -> Result<f64> {
    let d = s.dot(b)?;
    Ok(if d & 1 == 1 { -1.0 } else { 1.0 })
}

/// ⟨f, g⟩ = 2⁻ⁿ Σ_b f(b)g(b).
pub fn inner_product(f: &FunctionTable, g: &FunctionTable) -> Result<f64> {
    if f.n != g.n {
        return Err(Error::LengthMismatch {
            left: f.n,
            right: g.n,
        });
    }
    let sum: f64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b)
        .sum();
    Ok(sum / (1u64 << f.n) as f64)
}

/// Unnormalized in-place Walsh–Hadamard butterfly:
/// data[k] ← Σ_b data[b](−1)^{k·b}.
fn fwht_in_place(data: &mut [f64]) {
    let len = data.len();
    let mut h = 1;
    while h < len {
        let mut i = 0;
        while i < len {
            for j in i..i + h {
                let (x, y) = (data[j], data[j + h]);
                data[j] = x + y;
                data[j + h] = x - y;
            }
            i += 2 * h;
        }
        h *= 2;
    }
}

/// Analysis transform: ĝ(s) = 2⁻ⁿ Σ_b g(b)(−1)^{s·b}.
pub fn wht_forward(f: &FunctionTable) -> FourierSpectrum {
    let mut data = f.values.clone();
    fwht_in_place(&mut data);
    let scale = 1.0 / (1u64 << f.n) as f64;
    let mut coeffs = BTreeMap::new();
    for (bits, v) in data.into_iter().enumerate() {
        let c = v * scale;
        if c.abs() >= SPARSITY_EPS {
            coeffs.insert(bits as u32, c);
        }
    }
    FourierSpectrum { n: f.n, coeffs }
}

/// Synthesis transform: g(b) = Σ_s ĝ(s)χ_s(b). Exact inverse of
/// [`wht_forward`] up to 1e-12 per entry.
pub fn wht_inverse(spec: &FourierSpectrum) -> FunctionTable {
    let mut data = vec![0.0; 1usize << spec.n];
    for (&bits, &c) in &spec.coeffs {
        data[bits as usize] = c;
    }
    fwht_in_place(&mut data);
    FunctionTable {
        n: spec.n,
        values: data,
    }
}

/// Maximal Hamming weight over stored masks; 0 for the empty or constant
/// spectrum.
pub fn degree(spec: &FourierSpectrum) -> usize {
    spec.coeffs
        .keys()
        .map(|bits| bits.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// One-based indices of every variable appearing in some stored mask. Its
/// size upper-bounds the junta arity of the function.
pub fn junta_support(spec: &FourierSpectrum) -> Vec<usize> {
    let union = spec.coeffs.keys().fold(0u32, |acc, bits| acc | bits);
    (0..spec.n).filter(|&i| union >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Draw `count_terms` distinct masks of weight <= `d` with coefficients
/// uniform in [−1, 1]. Deterministic for a fixed seed.
pub fn random_low_degree(
    n: usize,
    d: usize,
    count_terms: usize,
    seed: u64,
) -> Result<FourierSpectrum> {
    if n == 0 || n > MAX_BITS {
        return Err(Error::BadBitLength { n, max: MAX_BITS });
    }
    let d = d.min(n);
    let per_weight: Vec<u64> = (0..=d).map(|k| binomial(n, k)).collect();
    let available: u64 = per_weight.iter().sum();
    if count_terms as u64 > available {
        return Err(Error::InfeasibleTermCount {
            requested: count_terms,
            degree: d,
            n,
            available,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = HashSet::with_capacity(count_terms);
    let mut coeffs = BTreeMap::new();
    while chosen.len() < count_terms {
        // Weight first, with probability proportional to the mask count,
        // then a uniform subset of that weight.
        let mut ticket = rng.random_range(0..available);
        let mut weight = 0;
        for (k, &cnt) in per_weight.iter().enumerate() {
            if ticket < cnt {
                weight = k;
                break;
            }
            ticket -= cnt;
        }
        let mask = random_subset_mask(&mut rng, n, weight);
        if !chosen.insert(mask) {
            continue;
        }
        let mut c: f64 = rng.random_range(-1.0..=1.0);
        while c.abs() < 1e-9 {
            c = rng.random_range(-1.0..=1.0);
        }
        coeffs.insert(mask, c);
    }
    Ok(FourierSpectrum { n, coeffs })
}

/// Uniform random mask of exactly `weight` set bits (Floyd's sampling).
fn random_subset_mask(rng: &mut ChaCha8Rng, n: usize, weight: usize) -> u32 {
    let mut mask = 0u32;
    for j in n - weight..n {
        let t = rng.random_range(0..=j);
        if mask >> t & 1 == 0 {
            mask |= 1 << t;
        } else {
            mask |= 1 << j;
        }
    }
    mask
}

/// Spectrum of g₃(b) = a₁(−1)^{b₁} + a₂(−1)^{b₂} + a₃(−1)^{b₃}.
pub fn g3(a1: f64, a2: f64, a3: f64) -> FourierSpectrum {
    FourierSpectrum::from_terms(
        3,
        &[
            ("100".parse().unwrap(), a1),
            ("010".parse().unwrap(), a2),
            ("001".parse().unwrap(), a3),
        ],
    )
    .expect("static masks are valid")
}

/// Spectrum of
/// g₆(b) = d₁(−1)^{b₁+b₄} + d₂(−1)^{b₁+b₅} + d₃(−1)^{b₂+b₄} + d₄(−1)^{b₂+b₅}.
pub fn g6(d1: f64, d2: f64, d3: f64, d4: f64) -> FourierSpectrum {
    FourierSpectrum::from_terms(
        6,
        &[
            ("100100".parse().unwrap(), d1),
            ("100010".parse().unwrap(), d2),
            ("010100".parse().unwrap(), d3),
            ("010010".parse().unwrap(), d4),
        ],
    )
    .expect("static masks are valid")
}
