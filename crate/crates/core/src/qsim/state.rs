//! Pure states and density matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qsim::matrix::CMatrix;
use crate::qsim::MAX_QUBITS;

const NORM_TOL: f64 = 1e-10;

/// A quantum state on `m` qubits: either a 2^m amplitude vector or a
/// 2^m x 2^m density matrix. Qubit 0 is the least-significant index.
#[derive(Clone, Debug)]
pub enum QuantumState {
    Pure { m: usize, amps: Vec<Complex64> },
    Density { m: usize, rho: CMatrix },
}

impl QuantumState {
    /// |0_m⟩.
    pub fn zero(m: usize) -> Result<Self> {
        check_qubits(m)?;
        let mut amps = vec![Complex64::ZERO; 1 << m];
        amps[0] = Complex64::ONE;
        Ok(QuantumState::Pure { m, amps })
    }

    /// Wrap an amplitude vector; must be normalized within 1e-10.
    pub fn from_amplitudes(m: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(m)?;
        if amps.len() != 1 << m {
            return Err(Error::DimensionMismatch {
                left: 1 << m,
                right: amps.len(),
            });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(QuantumState::Pure { m, amps })
    }

    /// Wrap a density matrix; must be Hermitian, unit trace, and PSD
    /// (smallest eigenvalue >= −1e-9).
    pub fn from_density(m: usize, rho: CMatrix) -> Result<Self> {
        check_qubits(m)?;
        if rho.dim() != 1 << m {
            return Err(Error::DimensionMismatch {
                left: 1 << m,
                right: rho.dim(),
            });
        }
        let defect = rho.hermiticity_defect();
        if defect > NORM_TOL {
            return Err(Error::BadDensity {
                reason: format!("not Hermitian (defect {defect:.3e})"),
            });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::BadDensity {
                reason: format!("trace {tr} != 1"),
            });
        }
        let (eigs, _) = crate::qsim::eigh::eigh_hermitian(&rho);
        if eigs[0] < -1e-9 {
            return Err(Error::BadDensity {
                reason: format!("negative eigenvalue {:.3e}", eigs[0]),
            });
        }
        Ok(QuantumState::Density { m, rho })
    }

    pub fn qubits(&self) -> usize {
        match self {
            QuantumState::Pure { m, .. } | QuantumState::Density { m, .. } => *m,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    /// Amplitudes of a pure state.
    pub fn amplitudes(&self) -> Result<&[Complex64]> {
        match self {
            QuantumState::Pure { amps, .. } => Ok(amps),
            QuantumState::Density { .. } => Err(Error::NotPure),
        }
    }

    /// Density matrix of the state (|ψ⟩⟨ψ| for pure states).
    pub fn density(&self) -> CMatrix {
        match self {
            QuantumState::Pure { amps, .. } => {
                CMatrix::from_fn(amps.len(), |i, j| amps[i] * amps[j].conj())
            }
            QuantumState::Density { rho, .. } => rho.clone(),
        }
    }

    /// `Tr[ρ²]`; 1 for any normalized pure state.
    pub fn purity(&self) -> f64 {
        match self {
            QuantumState::Pure { amps, .. } => {
                let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                n * n
            }
            QuantumState::Density { rho, .. } => {
                rho.matmul(rho).expect("same dim").trace().re
            }
        }
    }

    /// ⟨self|other⟩ for two pure states.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        let a = self.amplitudes()?;
        let b = other.amplitudes()?;
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
    }

    /// Tensor product, `self` occupying the low qubits.
    pub fn kron(&self, high: &Self) -> Result<Self> {
        let m = self.qubits() + high.qubits();
        check_qubits(m)?;
        match (self, high) {
            (
                QuantumState::Pure { amps: low, .. },
                QuantumState::Pure { amps: hi, .. },
            ) => {
                let mut amps = Vec::with_capacity(low.len() * hi.len());
                for h in hi {
                    for l in low {
                        amps.push(h * l);
                    }
                }
                Ok(QuantumState::Pure { m, amps })
            }
            _ => {
                // kron(high, low) puts `high` in the high-order index bits.
                let rho = high.density().kron(&self.density());
                Ok(QuantumState::Density { m, rho })
            }
        }
    }

    /// Measurement probabilities in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        match self {
            QuantumState::Pure { amps, .. } => amps.iter().map(|a| a.norm_sqr()).collect(),
            QuantumState::Density { rho, .. } => {
                (0..rho.dim()).map(|i| rho[(i, i)].re).collect()
            }
        }
    }
}

fn check_qubits(m: usize) -> Result<()> {
    if m == 0 || m > MAX_QUBITS {
        return Err(Error::BadQubitCount { m, max: MAX_QUBITS });
    }
    Ok(())
}
