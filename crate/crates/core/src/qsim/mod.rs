//! Dense quantum simulator: statevectors, density matrices, gate
//! application, Pauli algebra, exact and shot-sampled expectation values,
//! and Hermitian eigendecomposition.
//!
//! Qubit 0 is the least-significant statevector index, matching the
//! b₁ ↔ bit 0 convention of [`crate::bitfourier`]. Circuits and observables
//! are immutable once built and safe to share across threads; running a
//! circuit allocates fresh state per call.

pub mod circuit;
pub mod dense;
pub mod eigh;
pub mod gate;
pub mod matrix;
pub mod pauli;
pub mod state;

pub use circuit::{random_circuit, sample_expectation, Circuit};
pub use dense::{DenseObservable, Observable};
pub use eigh::eigh_hermitian;
pub use gate::{Gate, Param};
pub use matrix::CMatrix;
pub use pauli::{PauliOp, PauliSum, PauliWord};
pub use state::QuantumState;

/// Hard cap on simulator width; dense allocations stay bounded.
pub const MAX_QUBITS: usize = 14;
