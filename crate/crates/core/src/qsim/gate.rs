//! Gate descriptors and their matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A gate angle: either a bound value or a symbolic slot filled at run time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    Bound(f64),
    Free(usize),
}

impl Param {
    pub fn resolve(&self, bindings: &[f64]) -> Result<f64> {
        match *self {
            Param::Bound(v) => Ok(v),
            Param::Free(slot) => bindings.get(slot).copied().ok_or(Error::UnboundParameter {
                slot,
                given: bindings.len(),
            }),
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Bound(v)
    }
}

/// Gate set of the simulator. Rotations follow the e^{−iθG/2} convention:
/// R_Y, R_Z rotate about the Y/Z axes, R_n about an arbitrary unit axis
/// n₁X + n₂Y + n₃Z, and SwapRot implements e^{−i(β/2)SWAP}.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X { q: usize },
    H { q: usize },
    Ry { q: usize, theta: Param },
    Rz { q: usize, theta: Param },
    Rn { q: usize, axis: [f64; 3], theta: Param },
    Cz { a: usize, b: usize },
    SwapRot { a: usize, b: usize, beta: Param },
}

impl Gate {
    /// Number of free slots this gate may reference.
    pub fn free_slot(&self) -> Option<usize> {
        match self {
            Gate::Ry { theta, .. } | Gate::Rz { theta, .. } | Gate::Rn { theta, .. } => {
                match theta {
                    Param::Free(slot) => Some(*slot),
                    Param::Bound(_) => None,
                }
            }
            Gate::SwapRot { beta, .. } => match beta {
                Param::Free(slot) => Some(*slot),
                Param::Bound(_) => None,
            },
            _ => None,
        }
    }

    /// The 2x2 matrix of a single-qubit gate; `None` for two-qubit gates.
    pub fn single_qubit_matrix(&self, bindings: &[f64]) -> Result<Option<[[Complex64; 2]; 2]>> {
        let i = Complex64::I;
        let m = match self {
            Gate::X { .. } => single(0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()),
            Gate::H { .. } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                single(h.into(), h.into(), h.into(), (-h).into())
            }
            Gate::Ry { theta, .. } => {
                let t = theta.resolve(bindings)? / 2.0;
                single(
                    t.cos().into(),
                    (-t.sin()).into(),
                    t.sin().into(),
                    t.cos().into(),
                )
            }
            Gate::Rz { theta, .. } => {
                let t = theta.resolve(bindings)? / 2.0;
                single((-i * t).exp(), 0.0.into(), 0.0.into(), (i * t).exp())
            }
            Gate::Rn { axis, theta, .. } => {
                // cos(θ/2) I − i sin(θ/2)(n₁X + n₂Y + n₃Z)
                let t = theta.resolve(bindings)? / 2.0;
                let (c, s) = (t.cos(), t.sin());
                let [nx, ny, nz] = *axis;
                single(
                    Complex64::new(c, -s * nz),
                    Complex64::new(-s * ny, -s * nx),
                    Complex64::new(s * ny, -s * nx),
                    Complex64::new(c, s * nz),
                )
            }
            Gate::Cz { .. } | Gate::SwapRot { .. } => return Ok(None),
        };
        Ok(Some(m))
    }
}

fn single(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> [[Complex64; 2]; 2] {
    [[a, b], [c, d]]
}
