//! Fidelity-kernel baseline: kernel evaluation, Gram matrices, and kernel
//! ridge regression.
//!
//! The fidelity kernel k(b, b′) = |⟨ψ(b)|ψ(b′)⟩|² = Tr[ρ(b)ρ(b′)] compares
//! embedded feature states. Phase-embedded states are pairwise orthogonal,
//! so that kernel is the identity matrix on distinct inputs and pure
//! memorization; the QRAC kernel factorizes over triplets with overlap
//! ½(1 + r·r′) per qubit.

use num_complex::Complex64;

use crate::bitfourier::BitVector;
use crate::embed::{qrac_triplet_circuit, qrac_triplets, EmbeddingKind, QracAngles};
use crate::error::{Error, Result};
use crate::qsim::Circuit;
use crate::util::fmt_f64;

/// k(b₁, b₂) = |⟨ψ₁|ψ₂⟩|², clamped to [0, 1] against rounding overshoot.
///
/// Both embeddings produce product states, so the overlap is evaluated
/// factor by factor. Phase factors are |±⟩ and contribute exactly 1 or 0;
/// QRAC factors are the single-qubit triplet states.
pub fn fidelity_kernel(b1: &BitVector, b2: &BitVector, kind: EmbeddingKind) -> Result<f64> {
    if b1.len() != b2.len() {
        return Err(Error::LengthMismatch {
            left: b1.len(),
            right: b2.len(),
        });
    }
    match kind {
        EmbeddingKind::Phase => {
            let mut k = 1.0;
            for i in 0..b1.len() {
                // ⟨±|±⟩ per qubit: 1 on agreement, 0 otherwise.
                if b1.get(i) != b2.get(i) {
                    k = 0.0;
                }
            }
            Ok(k)
        }
        EmbeddingKind::Qrac => {
            let angles = QracAngles::default();
            let mut overlap = Complex64::ONE;
            for (t1, t2) in qrac_triplets(b1).iter().zip(&qrac_triplets(b2)) {
                let mut c1 = Circuit::new(1)?;
                qrac_triplet_circuit(0, t1, &angles, &mut c1)?;
                let mut c2 = Circuit::new(1)?;
                qrac_triplet_circuit(0, t2, &angles, &mut c2)?;
                overlap *= c1.run(&[])?.overlap(&c2.run(&[])?)?;
            }
            Ok(overlap.norm_sqr().clamp(0.0, 1.0))
        }
    }
}

/// Symmetric PSD Gram matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    t: usize,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn size(&self) -> usize {
        self.t
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.t + j]
    }

    /// Smallest eigenvalue, for PSD checks.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = crate::qsim::CMatrix::from_fn(self.t, |i, j| {
            num_complex::Complex64::new(self.get(i, j), 0.0)
        });
        let (eigs, _) = crate::qsim::eigh_hermitian(&m);
        eigs[0]
    }

    /// CSV: a header row of the input masks, then the t×t entries row-major.
    pub fn to_csv(&self, inputs: &[BitVector]) -> String {
        let mut out = inputs
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for i in 0..self.t {
            let row = (0..self.t)
                .map(|j| fmt_f64(self.get(i, j)))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

/// Gram matrix of the fidelity kernel on `inputs`. The diagonal is pinned
/// to exactly 1.
pub fn kernel_matrix(inputs: &[BitVector], kind: EmbeddingKind) -> Result<KernelMatrix> {
    let t = inputs.len();
    if t == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let mut entries = vec![0.0; t * t];
    for i in 0..t {
        entries[i * t + i] = 1.0;
        for j in i + 1..t {
            let k = fidelity_kernel(&inputs[i], &inputs[j], kind)?;
            entries[i * t + j] = k;
            entries[j * t + i] = k;
        }
    }
    Ok(KernelMatrix { t, entries })
}

/// Solve (K + βI)α = y by Cholesky. PSD kernels with duplicate rows get a
/// diagonal jitter ladder (1e-10 ×10 up to 1e-6) before the system is
/// declared singular.
pub fn krr_fit(k: &KernelMatrix, y: &[f64], beta: f64) -> Result<Vec<f64>> {
    if y.len() != k.t {
        return Err(Error::DimensionMismatch {
            left: k.t,
            right: y.len(),
        });
    }
    let base: Vec<f64> = (0..k.t * k.t)
        .map(|idx| {
            let (i, j) = (idx / k.t, idx % k.t);
            k.get(i, j) + if i == j { beta } else { 0.0 }
        })
        .collect();

    let mut jitter = 0.0;
    loop {
        let mut a = base.clone();
        if jitter > 0.0 {
            for i in 0..k.t {
                a[i * k.t + i] += jitter;
            }
        }
        if let Some(chol) = cholesky(&mut a, k.t) {
            return Ok(solve_cholesky(&chol, k.t, y));
        }
        jitter = if jitter == 0.0 { 1e-10 } else { jitter * 10.0 };
        if jitter > 1e-6 {
            return Err(Error::SingularKernel { max_jitter: 1e-6 });
        }
    }
}

/// In-place lower Cholesky; `None` when a pivot is not strictly positive.
fn cholesky(a: &mut [f64], t: usize) -> Option<Vec<f64>> {
    for j in 0..t {
        let mut diag = a[j * t + j];
        for k in 0..j {
            diag -= a[j * t + k] * a[j * t + k];
        }
        if diag <= 0.0 {
            return None;
        }
        let diag = diag.sqrt();
        a[j * t + j] = diag;
        for i in j + 1..t {
            let mut v = a[i * t + j];
            for k in 0..j {
                v -= a[i * t + k] * a[j * t + k];
            }
            a[i * t + j] = v / diag;
        }
    }
    Some(a.to_vec())
}

/// Solve L Lᵀ x = y given the lower factor.
fn solve_cholesky(l: &[f64], t: usize, y: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; t];
    for i in 0..t {
        let mut v = y[i];
        for k in 0..i {
            v -= l[i * t + k] * z[k];
        }
        z[i] = v / l[i * t + i];
    }
    let mut x = vec![0.0; t];
    for i in (0..t).rev() {
        let mut v = z[i];
        for k in i + 1..t {
            v -= l[k * t + i] * x[k];
        }
        x[i] = v / l[i * t + i];
    }
    x
}

/// Representer-form prediction Σᵢ αᵢ k(xᵢ, b).
pub fn krr_predict(
    alpha: &[f64],
    train_inputs: &[BitVector],
    query: &BitVector,
    kind: EmbeddingKind,
) -> Result<f64> {
    if alpha.len() != train_inputs.len() {
        return Err(Error::DimensionMismatch {
            left: train_inputs.len(),
            right: alpha.len(),
        });
    }
    let mut acc = 0.0;
    for (a, b) in alpha.iter().zip(train_inputs) {
        acc += a * fidelity_kernel(b, query, kind)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitfourier::{g3, wht_inverse};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn kernel_basic_values() {
        let b = bv("1011");
        assert_eq!(fidelity_kernel(&b, &b, EmbeddingKind::Phase).unwrap(), 1.0);
        assert_eq!(fidelity_kernel(&b, &b, EmbeddingKind::Qrac).unwrap(), 1.0);

        // Any differing bit makes phase-embedded states orthogonal.
        let c = bv("1010");
        assert_eq!(fidelity_kernel(&b, &c, EmbeddingKind::Phase).unwrap(), 0.0);
        assert!(fidelity_kernel(&b, &bv("101"), EmbeddingKind::Phase).is_err());
    }

    #[test]
    fn qrac_single_triplet_overlap() {
        // Bloch vectors (1,1,1)/√3 and (−1,1,1)/√3: Tr[σ₁σ₂] = ½(1 + 1/3).
        let k = fidelity_kernel(&bv("000"), &bv("100"), EmbeddingKind::Qrac).unwrap();
        assert!((k - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn factorized_kernel_matches_dense_overlap() {
        // The per-factor product must agree with the full statevector
        // overlap |⟨ψ(b)|ψ(b′)⟩|² of the embedded states.
        use crate::embed::embedded_state;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [EmbeddingKind::Phase, EmbeddingKind::Qrac] {
            for _ in 0..10 {
                let b1 = BitVector::new(5, rng.random_range(0..32)).unwrap();
                let b2 = BitVector::new(5, rng.random_range(0..32)).unwrap();
                let whole = fidelity_kernel(&b1, &b2, kind).unwrap();
                let s1 = embedded_state(kind, &b1).unwrap();
                let s2 = embedded_state(kind, &b2).unwrap();
                let dense = s1.overlap(&s2).unwrap().norm_sqr();
                assert!((whole - dense).abs() < 1e-12, "{kind:?} {b1} {b2}");
            }
        }
    }

    #[test]
    fn kernel_symmetry_and_range() {
        for kind in [EmbeddingKind::Phase, EmbeddingKind::Qrac] {
            for b1 in BitVector::all(4) {
                for b2 in BitVector::all(4) {
                    let k12 = fidelity_kernel(&b1, &b2, kind).unwrap();
                    let k21 = fidelity_kernel(&b2, &b1, kind).unwrap();
                    assert_eq!(k12, k21);
                    assert!((0.0..=1.0).contains(&k12));
                }
            }
        }
    }

    #[test]
    fn gram_matrix_properties() {
        let inputs: Vec<BitVector> = BitVector::all(3).collect();
        let k = kernel_matrix(&inputs, EmbeddingKind::Qrac).unwrap();
        assert_eq!(k.size(), 8);
        for i in 0..8 {
            assert_eq!(k.get(i, i), 1.0);
        }
        assert!(k.min_eigenvalue() >= -1e-9);

        // Phase embedding on distinct inputs: the identity matrix.
        let k = kernel_matrix(&inputs, EmbeddingKind::Phase).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(k.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }

        let single = kernel_matrix(&inputs[..1], EmbeddingKind::Phase).unwrap();
        assert_eq!(single.size(), 1);
        assert_eq!(single.get(0, 0), 1.0);

        // PSD holds on random input subsets too.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let subset: Vec<BitVector> = (0..5)
                .map(|_| BitVector::new(6, rng.random_range(0..64)).unwrap())
                .collect();
            let k = kernel_matrix(&subset, EmbeddingKind::Qrac).unwrap();
            assert!(k.min_eigenvalue() >= -1e-9);
        }
    }

    #[test]
    fn krr_identity_kernel_cases() {
        let inputs: Vec<BitVector> = BitVector::all(2).collect();
        let k = kernel_matrix(&inputs, EmbeddingKind::Phase).unwrap();
        let y = [0.5, -1.0, 2.0, 0.0];

        // K = I, β = 0: α = y.
        let alpha = krr_fit(&k, &y, 0.0).unwrap();
        for (a, want) in alpha.iter().zip(&y) {
            assert!((a - want).abs() < 1e-12);
        }

        // Large ridge: α → y/β.
        let beta = 1e6;
        let alpha = krr_fit(&k, &y, beta).unwrap();
        for (a, want) in alpha.iter().zip(&y) {
            if *want != 0.0 {
                assert!((a - want / beta).abs() / (want / beta).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn krr_interpolates_g3_with_qrac_kernel() {
        let table = wht_inverse(&g3(0.5, -0.1, 0.25));
        let inputs: Vec<BitVector> = BitVector::all(3).collect();
        let y: Vec<f64> = inputs.iter().map(|b| table.get(b)).collect();
        let k = kernel_matrix(&inputs, EmbeddingKind::Qrac).unwrap();
        let alpha = krr_fit(&k, &y, 0.0).unwrap();
        for (b, want) in inputs.iter().zip(&y) {
            let got = krr_predict(&alpha, &inputs, b, EmbeddingKind::Qrac).unwrap();
            assert!((got - want).abs() < 1e-8, "b = {b}");
        }
    }

    #[test]
    fn krr_prediction_edges() {
        let inputs: Vec<BitVector> = BitVector::all(2).collect();
        // α = 0 predicts 0 everywhere.
        let zero = vec![0.0; 4];
        for b in BitVector::all(2) {
            assert_eq!(
                krr_predict(&zero, &inputs, &b, EmbeddingKind::Qrac).unwrap(),
                0.0
            );
        }

        // Identity (phase) kernel memorizes: fitted labels return exactly,
        // and the weighted kernel sum carries nothing to unseen inputs.
        let seen: Vec<BitVector> = vec![bv("00"), bv("01"), bv("10")];
        let y = [1.0, -1.0, 0.5];
        let k = kernel_matrix(&seen, EmbeddingKind::Phase).unwrap();
        let alpha = krr_fit(&k, &y, 0.0).unwrap();
        for (b, want) in seen.iter().zip(&y) {
            let got = krr_predict(&alpha, &seen, b, EmbeddingKind::Phase).unwrap();
            assert!((got - want).abs() < 1e-8);
        }
        let unseen = bv("11");
        assert_eq!(
            krr_predict(&alpha, &seen, &unseen, EmbeddingKind::Phase).unwrap(),
            0.0
        );

        assert!(krr_predict(&[0.0; 2], &seen, &unseen, EmbeddingKind::Phase).is_err());
    }

    #[test]
    fn singular_system_reported() {
        // Duplicate rows at β = 0 exceed the jitter ladder only if the
        // kernel is exactly rank-deficient; duplicated inputs do that.
        let inputs = vec![bv("00"), bv("00")];
        let k = kernel_matrix(&inputs, EmbeddingKind::Phase).unwrap();
        // Contradictory labels on identical inputs cannot be interpolated;
        // the jitter ladder still returns a finite least-squares-ish answer
        // or reports singularity. Consistent labels must succeed.
        let ok = krr_fit(&k, &[1.0, 1.0], 0.0);
        assert!(ok.is_ok());
        let qrac_csv = kernel_matrix(&inputs, EmbeddingKind::Qrac)
            .unwrap()
            .to_csv(&inputs);
        assert!(qrac_csv.starts_with("00,00\n"));
    }

    #[test]
    fn kernel_matrix_csv_shape() {
        let inputs: Vec<BitVector> = BitVector::all(2).collect();
        let k = kernel_matrix(&inputs, EmbeddingKind::Qrac).unwrap();
        let csv = k.to_csv(&inputs);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("00,10,01,11\n"));
    }
}
