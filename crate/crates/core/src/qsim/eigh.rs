//! Cyclic Jacobi eigendecomposition for Hermitian matrices.
//!
//! Each sweep visits every off-diagonal element (p, q) and applies a complex
//! plane rotation that annihilates it. Off-diagonal mass decreases
//! monotonically; for the sizes this crate works with (dim <= 256) a handful
//! of sweeps reach machine precision.

use num_complex::Complex64;

use crate::qsim::matrix::CMatrix;

const MAX_SWEEPS: usize = 50;

/// Decompose a Hermitian `a` into `(eigenvalues, V)` with eigenvalues
/// ascending, columns of `V` the matching eigenvectors, and
/// a = V diag(λ) V†. Hermiticity is the caller's responsibility.
pub fn eigh_hermitian(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.dim();
    let mut work = a.clone();
    let mut v = CMatrix::identity(n);

    let scale: f64 = (0..n)
        .map(|i| work[(i, i)].norm())
        .fold(1.0f64, f64::max);
    let tol = 1e-14 * scale;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = off_diagonal_mass(&work);
        if off < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut work, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigs[i].total_cmp(&eigs[j]));

    let sorted: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    (sorted, vectors)
}

fn off_diagonal_mass(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for p in 0..n - 1 {
        for q in p + 1..n {
            sum += a[(p, q)].norm();
        }
    }
    sum
}

/// One complex Jacobi rotation zeroing A[p][q], accumulated into V.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs < 1e-300 {
        return;
    }
    let phase = apq / abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    // tan(2ψ) = 2|a_pq| / (a_qq − a_pp), solved for t = tan ψ with |t| <= 1.
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Column rotation J: J[p][p] = c, J[p][q] = s·phase,
    // J[q][p] = −s·conj(phase), J[q][q] = c; A ← J† A J, V ← V J.
    let sp = phase * s;
    let n = a.dim();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * sp.conj();
        a[(k, q)] = akp * sp + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * sp;
        a[(q, k)] = apk * sp.conj() + aqk * c;
    }
    // Clean the annihilated pair and any imaginary dust on the diagonal.
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;
    a[(p, p)] = a[(p, p)].re.into();
    a[(q, q)] = a[(q, q)].re.into();

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * sp.conj();
        v[(k, q)] = vkp * sp + vkq * c;
    }
}
