//! Circuits and statevector evolution.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qsim::gate::{Gate, Param};
use crate::qsim::matrix::CMatrix;
use crate::qsim::pauli::PauliSum;
use crate::qsim::state::QuantumState;
use crate::qsim::MAX_QUBITS;

/// An ordered gate list on `m` qubits. Angles may be bound values or
/// symbolic slots bound at run time.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    m: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_QUBITS {
            return Err(Error::BadQubitCount { m, max: MAX_QUBITS });
        }
        Ok(Self { m, gates: Vec::new() })
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn check_q(&self, q: usize) -> Result<()> {
        if q >= self.m {
            return Err(Error::QubitOutOfRange { q, m: self.m });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_q(a)?;
        self.check_q(b)?;
        if a == b {
            return Err(Error::DuplicateQubit { a, b });
        }
        Ok(())
    }

    pub fn x(&mut self, q: usize) -> Result<()> {
        self.check_q(q)?;
        self.gates.push(Gate::X { q });
        Ok(())
    }

    pub fn h(&mut self, q: usize) -> Result<()> {
        self.check_q(q)?;
        self.gates.push(Gate::H { q });
        Ok(())
    }

    pub fn ry(&mut self, q: usize, theta: impl Into<Param>) -> Result<()> {
        self.check_q(q)?;
        self.gates.push(Gate::Ry { q, theta: theta.into() });
        Ok(())
    }

    pub fn rz(&mut self, q: usize, theta: impl Into<Param>) -> Result<()> {
        self.check_q(q)?;
        self.gates.push(Gate::Rz { q, theta: theta.into() });
        Ok(())
    }

    /// Rotation about an arbitrary Bloch axis; the axis must be unit length
    /// within 1e-12.
    pub fn rn(&mut self, q: usize, axis: [f64; 3], theta: impl Into<Param>) -> Result<()> {
        self.check_q(q)?;
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::AxisNotUnit { norm });
        }
        self.gates.push(Gate::Rn { q, axis, theta: theta.into() });
        Ok(())
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        self.gates.push(Gate::Cz { a, b });
        Ok(())
    }

    /// e^{−i(β/2)SWAP} between qubits `a` and `b`.
    pub fn swap_rot(&mut self, a: usize, b: usize, beta: impl Into<Param>) -> Result<()> {
        self.check_pair(a, b)?;
        self.gates.push(Gate::SwapRot { a, b, beta: beta.into() });
        Ok(())
    }

    /// Append all gates of `other` (same qubit count).
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.m != self.m {
            return Err(Error::DimensionMismatch {
                left: self.m,
                right: other.m,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Number of bindings needed: one past the highest free slot.
    pub fn free_param_count(&self) -> usize {
        self.gates
            .iter()
            .filter_map(Gate::free_slot)
            .map(|s| s + 1)
            .max()
            .unwrap_or(0)
    }

    /// Apply the circuit in order to |0_m⟩.
    pub fn run(&self, bindings: &[f64]) -> Result<QuantumState> {
        let mut amps = vec![Complex64::ZERO; 1 << self.m];
        amps[0] = Complex64::ONE;
        self.apply(&mut amps, bindings)?;
        Ok(QuantumState::Pure { m: self.m, amps })
    }

    /// Apply the circuit to an existing amplitude vector.
    pub fn apply(&self, amps: &mut [Complex64], bindings: &[f64]) -> Result<()> {
        if amps.len() != 1 << self.m {
            return Err(Error::DimensionMismatch {
                left: 1 << self.m,
                right: amps.len(),
            });
        }
        for gate in &self.gates {
            match gate {
                Gate::X { q } => apply_x(amps, *q),
                Gate::Cz { a, b } => apply_cz(amps, *a, *b),
                Gate::SwapRot { a, b, beta } => {
                    apply_swap_rot(amps, *a, *b, beta.resolve(bindings)?)
                }
                g => {
                    let u = g
                        .single_qubit_matrix(bindings)?
                        .expect("two-qubit gates handled above");
                    let q = match g {
                        Gate::H { q } | Gate::Ry { q, .. } | Gate::Rz { q, .. } | Gate::Rn { q, .. } => *q,
                        _ => unreachable!(),
                    };
                    apply_single(amps, q, &u);
                }
            }
        }
        Ok(())
    }

    /// Dense unitary of the whole circuit, built column by column.
    pub fn unitary(&self, bindings: &[f64]) -> Result<CMatrix> {
        let dim = 1usize << self.m;
        let mut out = CMatrix::zeros(dim);
        for col in 0..dim {
            let mut amps = vec![Complex64::ZERO; dim];
            amps[col] = Complex64::ONE;
            self.apply(&mut amps, bindings)?;
            for (row, a) in amps.into_iter().enumerate() {
                out[(row, col)] = a;
            }
        }
        Ok(out)
    }
}

fn apply_single(amps: &mut [Complex64], q: usize, u: &[[Complex64; 2]; 2]) {
    let stride = 1usize << q;
    let mut base = 0;
    while base < amps.len() {
        for j in base..base + stride {
            let a = amps[j];
            let b = amps[j + stride];
            amps[j] = u[0][0] * a + u[0][1] * b;
            amps[j + stride] = u[1][0] * a + u[1][1] * b;
        }
        base += 2 * stride;
    }
}

fn apply_x(amps: &mut [Complex64], q: usize) {
    let stride = 1usize << q;
    let mut base = 0;
    while base < amps.len() {
        for j in base..base + stride {
            amps.swap(j, j + stride);
        }
        base += 2 * stride;
    }
}

fn apply_cz(amps: &mut [Complex64], a: usize, b: usize) {
    let mask = (1usize << a) | (1usize << b);
    for (idx, amp) in amps.iter_mut().enumerate() {
        if idx & mask == mask {
            *amp = -*amp;
        }
    }
}

/// e^{−i(β/2)SWAP} = cos(β/2)·I − i·sin(β/2)·SWAP on qubits (a, b).
fn apply_swap_rot(amps: &mut [Complex64], a: usize, b: usize, beta: f64) {
    let half = beta / 2.0;
    let c = Complex64::new(half.cos(), 0.0);
    let mis = Complex64::new(0.0, -half.sin());
    let equal_phase = c + mis; // e^{−iβ/2} on the symmetric 00/11 sector
    let (abit, bbit) = (1usize << a, 1usize << b);
    for idx in 0..amps.len() {
        let has_a = idx & abit != 0;
        let has_b = idx & bbit != 0;
        if has_a == has_b {
            amps[idx] *= equal_phase;
        } else if has_a {
            // Handle each {01, 10} pair once, from its |a=1, b=0⟩ member.
            let partner = idx ^ abit ^ bbit;
            let hi = amps[idx];
            let lo = amps[partner];
            amps[idx] = c * hi + mis * lo;
            amps[partner] = c * lo + mis * hi;
        }
    }
}

/// Estimate the expectation of a diagonal observable by sampling bitstrings
/// from the exact output distribution of `circuit`. Deterministic for a
/// fixed seed; converges to the exact expectation as `shots` grows.
pub fn sample_expectation(
    circuit: &Circuit,
    bindings: &[f64],
    diagonal: &PauliSum,
    shots: usize,
    seed: u64,
) -> Result<f64> {
    if !diagonal.is_diagonal() {
        let word = diagonal
            .terms()
            .find(|(w, _)| !w.is_diagonal())
            .map(|(w, _)| w.to_string())
            .unwrap_or_default();
        return Err(Error::NotDiagonal { word });
    }
    if diagonal.qubits() != circuit.qubits() {
        return Err(Error::DimensionMismatch {
            left: circuit.qubits(),
            right: diagonal.qubits(),
        });
    }
    let state = circuit.run(bindings)?;
    let probs = state.probabilities();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;

    let eigenvalues: Vec<f64> = (0..probs.len())
        .map(|j| diagonal.diagonal_value(j))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        sum += eigenvalues[idx];
    }
    Ok(sum / shots as f64)
}

/// Deterministic pseudo-random circuit: `layers` rounds of RY/RZ rotations on
/// every qubit followed by a ring of CZ gates. Used by verification suites.
pub fn random_circuit(m: usize, layers: usize, seed: u64) -> Result<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(m)?;
    for _ in 0..layers {
        for q in 0..m {
            c.ry(q, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))?;
            c.rz(q, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))?;
        }
        if m > 1 {
            for q in 0..m - 1 {
                c.cz(q, q + 1)?;
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::dense::DenseObservable;

    #[test]
    fn empty_circuit_leaves_zero_state() {
        let c = Circuit::new(1).unwrap();
        let s = c.run(&[]).unwrap();
        assert_eq!(s.amplitudes().unwrap(), &[Complex64::ONE, Complex64::ZERO]);
    }

    #[test]
    fn x_flips() {
        let mut c = Circuit::new(1).unwrap();
        c.x(0).unwrap();
        let s = c.run(&[]).unwrap();
        assert_eq!(s.amplitudes().unwrap(), &[Complex64::ZERO, Complex64::ONE]);
    }

    #[test]
    fn h_rz_gives_minus_state() {
        // H then RZ(π) sends |0⟩ to |−⟩ up to phase: ⟨X⟩ = −1.
        let mut c = Circuit::new(1).unwrap();
        c.h(0).unwrap();
        c.rz(0, std::f64::consts::PI).unwrap();
        let s = c.run(&[]).unwrap();
        let x = PauliSum::from_terms(1, &[(1.0, "X")]).unwrap();
        assert!((x.expectation(&s).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_preserved_on_random_circuits() {
        for seed in 0..6 {
            let m = 1 + (seed as usize % 8);
            let c = random_circuit(m, 50usize.div_ceil(2 * m), seed).unwrap();
            let s = c.run(&[]).unwrap();
            let norm: f64 = s.amplitudes().unwrap().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn circuit_unitary_is_unitary() {
        let c = random_circuit(3, 4, 9).unwrap();
        let u = c.unitary(&[]).unwrap();
        assert!(u.unitarity_defect() < 1e-12);

        // Every gate kind in one circuit.
        let mut c = Circuit::new(3).unwrap();
        c.x(0).unwrap();
        c.h(1).unwrap();
        c.ry(2, 0.7).unwrap();
        c.rz(0, -1.9).unwrap();
        c.rn(1, [0.6, 0.0, 0.8], 2.3).unwrap();
        c.cz(0, 2).unwrap();
        c.swap_rot(1, 2, 1.1).unwrap();
        assert!(c.unitary(&[]).unwrap().unitarity_defect() < 1e-12);
    }

    #[test]
    fn swap_rot_at_pi_is_swap_up_to_phase() {
        let mut c = Circuit::new(2).unwrap();
        c.x(0).unwrap(); // |01⟩ (qubit 0 set)
        c.swap_rot(0, 1, std::f64::consts::PI).unwrap();
        let s = c.run(&[]).unwrap();
        let mut want = Circuit::new(2).unwrap();
        want.x(1).unwrap();
        let t = want.run(&[]).unwrap();
        assert!((s.overlap(&t).unwrap().norm() - 1.0).abs() < 1e-10);

        // And on a random state via the dense unitary.
        let mut sr = Circuit::new(2).unwrap();
        sr.swap_rot(0, 1, std::f64::consts::PI).unwrap();
        let u = sr.unitary(&[]).unwrap();
        for (j, k) in [(0usize, 0usize), (1, 2), (2, 1), (3, 3)] {
            assert!((u[(k, j)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_rot_at_zero_is_identity() {
        let mut c = Circuit::new(2).unwrap();
        c.swap_rot(0, 1, 0.0).unwrap();
        let u = c.unitary(&[]).unwrap();
        assert!(u.frobenius_distance(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn free_parameters_bind_at_run_time() {
        let mut c = Circuit::new(1).unwrap();
        c.ry(0, Param::Free(0)).unwrap();
        assert_eq!(c.free_param_count(), 1);
        assert!(matches!(
            c.run(&[]),
            Err(Error::UnboundParameter { slot: 0, given: 0 })
        ));
        let s = c.run(&[std::f64::consts::PI]).unwrap();
        assert!((s.amplitudes().unwrap()[1].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_bounds_checked() {
        let mut c = Circuit::new(2).unwrap();
        assert!(c.x(2).is_err());
        assert!(c.cz(0, 0).is_err());
        assert!(c.rn(0, [1.0, 1.0, 0.0], 0.5).is_err());
        assert!(Circuit::new(0).is_err());
        assert!(Circuit::new(15).is_err());
    }

    #[test]
    fn run_matches_dense_oracle() {
        // ⟨ψ|O|ψ⟩ from the simulator equals the dense matrix-vector product.
        let c = random_circuit(3, 3, 21).unwrap();
        let s = c.run(&[]).unwrap();
        let o = DenseObservable::random(3, 5).unwrap();
        let amps = s.amplitudes().unwrap();
        let via_matvec: Complex64 = o
            .matrix()
            .matvec(amps)
            .unwrap()
            .iter()
            .zip(amps)
            .map(|(ov, a)| a.conj() * ov)
            .sum();
        let direct = o.expectation(&s).unwrap();
        assert!((via_matvec.re - direct).abs() < 1e-12);
        assert!(via_matvec.im.abs() < 1e-10);
    }

    #[test]
    fn sampling_identity_is_exact() {
        let c = random_circuit(2, 2, 3).unwrap();
        let id = PauliSum::identity(2);
        assert_eq!(sample_expectation(&c, &[], &id, 64, 1).unwrap(), 1.0);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let c = random_circuit(2, 3, 8).unwrap();
        let d = PauliSum::z_all(2);
        let a = sample_expectation(&c, &[], &d, 2000, 77).unwrap();
        let b = sample_expectation(&c, &[], &d, 2000, 77).unwrap();
        assert_eq!(a, b);
        assert!(sample_expectation(
            &c,
            &[],
            &PauliSum::from_terms(2, &[(1.0, "XI")]).unwrap(),
            10,
            0
        )
        .is_err());
    }

    #[test]
    fn sampling_converges_to_exact() {
        let c = random_circuit(3, 3, 12).unwrap();
        let d = PauliSum::z_all(3);
        let exact = d.expectation(&c.run(&[]).unwrap()).unwrap();
        let shots = 1_000_000;
        let sampled = sample_expectation(&c, &[], &d, shots, 4).unwrap();
        // Var(Z^⊗m sample) = 1 − f²; 3σ window.
        let sigma = ((1.0 - exact * exact) / shots as f64).sqrt();
        assert!(
            (sampled - exact).abs() < 3.0 * sigma,
            "sampled {sampled}, exact {exact}, sigma {sigma}"
        );
    }
}
