//! Variational linear quantum models for real-valued functions on the
//! Boolean cube 𝔹ⁿ = {0,1}ⁿ.
//!
//! The crate combines five pieces:
//!
//! - [`bitfourier`] — Walsh–Hadamard analysis of functions on 𝔹ⁿ: transforms,
//!   degree, junta support, sparse spectra and test-function generators.
//! - [`qsim`] — a dense statevector/density-matrix simulator with Pauli
//!   algebra, exact and shot-sampled expectation values, and a Jacobi
//!   eigensolver for Hermitian observables.
//! - [`embed`] — data-encoding circuits: the phase embedding (one qubit per
//!   bit), the (3,1) quantum-random-access-code embedding (one qubit per bit
//!   triplet), permuted and repeated variants, and variational SWAP layers.
//! - [`synth`] — constructive synthesis of observables whose expectation
//!   reproduces a target spectrum exactly, ensemble decompositions for
//!   low-degree functions, and model-spectrum extraction.
//! - [`train`] / [`kernel`] — variational training of hardware-efficient
//!   models against square loss, and a fidelity-kernel ridge-regression
//!   baseline.
//!
//! Bit convention used everywhere: variable b₁ occupies the least-significant
//! mask bit, qubit 0 is the least-significant statevector index, and masks
//! print with b₁ leftmost.

pub mod bitfourier;
pub mod embed;
pub mod error;
pub mod kernel;
pub mod qsim;
pub mod synth;
pub mod train;
pub mod util;

pub use error::{Error, Result};
