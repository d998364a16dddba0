//! Dense Hermitian observables.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qsim::eigh::eigh_hermitian;
use crate::qsim::matrix::CMatrix;
use crate::qsim::pauli::PauliSum;
use crate::qsim::state::QuantumState;

const HERMITIAN_TOL: f64 = 1e-10;

/// A 2^m x 2^m Hermitian matrix observable. Hermiticity is checked at
/// construction (deviation below 1e-10), so downstream code can rely on it.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseObservable {
    m: usize,
    matrix: CMatrix,
}

impl DenseObservable {
    pub fn new(m: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != 1 << m {
            return Err(Error::DimensionMismatch {
                left: 1 << m,
                right: matrix.dim(),
            });
        }
        let deviation = matrix.hermiticity_defect();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { m, matrix })
    }

    /// Deterministic random Hermitian observable with entries of order one.
    pub fn random(m: usize, seed: u64) -> Result<Self> {
        let dim = 1usize << m;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = CMatrix::zeros(dim);
        for i in 0..dim {
            a[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = Complex64::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        Self::new(m, a)
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// ⟨ψ|O|ψ⟩ for pure states, `Tr[Oρ]` for densities. The imaginary residue
    /// must stay below 1e-9 and is discarded after the check.
    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        if state.qubits() != self.m {
            return Err(Error::DimensionMismatch {
                left: 1 << self.m,
                right: state.dim(),
            });
        }
        let value: Complex64 = match state {
            QuantumState::Pure { amps, .. } => {
                let ov = self.matrix.matvec(amps)?;
                amps.iter().zip(&ov).map(|(a, b)| a.conj() * b).sum()
            }
            QuantumState::Density { rho, .. } => {
                // Tr[Oρ] without forming the product matrix.
                let dim = rho.dim();
                let mut acc = Complex64::ZERO;
                for i in 0..dim {
                    for k in 0..dim {
                        acc += self.matrix[(i, k)] * rho[(k, i)];
                    }
                }
                acc
            }
        };
        if value.im.abs() >= 1e-9 {
            return Err(Error::ImaginaryResidue { imag: value.im });
        }
        Ok(value.re)
    }

    /// Eigendecomposition O = V diag(λ) V†, eigenvalues ascending.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        eigh_hermitian(&self.matrix)
    }
}

/// Either observable representation; ensembles carry one per member.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Dense(DenseObservable),
    Pauli(PauliSum),
}

impl Observable {
    pub fn qubits(&self) -> usize {
        match self {
            Observable::Dense(o) => o.qubits(),
            Observable::Pauli(p) => p.qubits(),
        }
    }

    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        match self {
            Observable::Dense(o) => o.expectation(state),
            Observable::Pauli(p) => p.expectation(state),
        }
    }

    pub fn to_dense(&self) -> Result<DenseObservable> {
        match self {
            Observable::Dense(o) => Ok(o.clone()),
            Observable::Pauli(p) => DenseObservable::new(p.qubits(), p.to_dense()?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::circuit::random_circuit;

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = Complex64::ONE; // no conjugate partner
        assert!(matches!(
            DenseObservable::new(1, m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn identity_expectation() {
        let o = DenseObservable::new(2, CMatrix::identity(4)).unwrap();
        let s = random_circuit(2, 2, 1).unwrap().run(&[]).unwrap();
        assert!((o.expectation(&s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_on_one() {
        let mut z = CMatrix::zeros(2);
        z[(0, 0)] = Complex64::ONE;
        z[(1, 1)] = -Complex64::ONE;
        let o = DenseObservable::new(1, z).unwrap();
        let mut c = crate::qsim::circuit::Circuit::new(1).unwrap();
        c.x(0).unwrap();
        assert_eq!(o.expectation(&c.run(&[]).unwrap()).unwrap(), -1.0);
    }

    #[test]
    fn pure_and_density_paths_agree() {
        let o = DenseObservable::random(3, 17).unwrap();
        let s = random_circuit(3, 3, 17).unwrap().run(&[]).unwrap();
        let pure = o.expectation(&s).unwrap();
        let dens = QuantumState::from_density(3, s.density()).unwrap();
        assert!((o.expectation(&dens).unwrap() - pure).abs() < 1e-10);
    }

    #[test]
    fn eigh_reconstructs() {
        let o = DenseObservable::random(3, 23).unwrap();
        let (eigs, v) = o.eigh();
        let lambda = CMatrix::from_fn(8, |i, j| {
            if i == j {
                Complex64::new(eigs[i], 0.0)
            } else {
                Complex64::ZERO
            }
        });
        let back = v.matmul(&lambda).unwrap().matmul(&v.adjoint()).unwrap();
        assert!(o.matrix().frobenius_distance(&back) < 1e-9);
    }

    #[test]
    fn pauli_and_dense_observables_agree() {
        let p = PauliSum::from_terms(2, &[(0.7, "XZ"), (-0.3, "YI"), (0.2, "IZ")]).unwrap();
        let o = Observable::Pauli(p.clone()).to_dense().unwrap();
        let s = random_circuit(2, 3, 5).unwrap().run(&[]).unwrap();
        let a = p.expectation(&s).unwrap();
        let b = o.expectation(&s).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
