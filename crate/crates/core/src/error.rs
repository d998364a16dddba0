//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by construction and evaluation routines across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bit length must be in 1..={max}, got {n}")]
    BadBitLength { n: usize, max: usize },

    #[error("mask {bits:#b} has bits set beyond position {n}")]
    StrayBits { n: usize, bits: u32 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("table for n = {n} must hold exactly {expected} values, got {got}")]
    BadTableSize { n: usize, expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("cannot draw {requested} distinct masks of weight <= {degree} on {n} bits ({available} exist)")]
    InfeasibleTermCount {
        requested: usize,
        degree: usize,
        n: usize,
        available: u64,
    },

    #[error("degree {degree} exceeds limit {limit}")]
    DegreeTooHigh { degree: usize, limit: usize },

    #[error("qubit count must be in 1..={max}, got {m}")]
    BadQubitCount { m: usize, max: usize },

    #[error("qubit index {q} out of range for {m} qubits")]
    QubitOutOfRange { q: usize, m: usize },

    #[error("two-qubit gate needs distinct qubits, got ({a}, {b})")]
    DuplicateQubit { a: usize, b: usize },

    #[error("rotation axis must be unit length, got |axis| = {norm}")]
    AxisNotUnit { norm: f64 },

    #[error("parameter slot {slot} is unbound ({given} bindings given)")]
    UnboundParameter { slot: usize, given: usize },

    #[error("parameter count mismatch: expected {expected}, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expectation has non-negligible imaginary part {imag:.3e}")]
    ImaginaryResidue { imag: f64 },

    #[error("observable must contain only I/Z factors, term {word} does not")]
    NotDiagonal { word: String },

    #[error("invalid Pauli character '{c}'")]
    BadPauliChar { c: char },

    #[error("state is not pure, operation needs amplitudes")]
    NotPure,

    #[error("state is not normalized: |psi|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("density matrix invalid: {reason}")]
    BadDensity { reason: String },

    #[error("subset selector must be strictly increasing within 1..={n}, got {indices:?}")]
    BadSelector { indices: Vec<usize>, n: usize },

    #[error("index array {map:?} is not a permutation of 1..={n}")]
    BadPermutation { map: Vec<usize>, n: usize },

    #[error("QRAC angles leave a Bloch component at zero: ({x:.3e}, {y:.3e}, {z:.3e})")]
    DegenerateQracAngles { x: f64, y: f64, z: f64 },

    #[error("first interleave block must be one Hadamard per qubit")]
    BadFirstInterleave,

    #[error("expected {expected} swap angles for {m} qubits, got {got}")]
    BadSwapLayer {
        m: usize,
        expected: usize,
        got: usize,
    },

    #[error("spectrum mask {mask} lies outside the reachable QRAC support")]
    SupportOutsideKqe { mask: String },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("shot-mode gradients are not supported; use exact expectation")]
    ShotModeGradient,

    #[error("kernel system is singular even with diagonal jitter up to {max_jitter:.1e}")]
    SingularKernel { max_jitter: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
