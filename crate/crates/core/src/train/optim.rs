//! Derivative-free and gradient-based minimizers used by model training.
//!
//! All three return the best parameter vector seen together with a
//! per-iteration loss trace, and stop early once the loss drops below
//! [`CONVERGENCE_EPS`].

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Training stops once the loss falls below this.
pub const CONVERGENCE_EPS: f64 = 1e-10;

pub struct OptimRun {
    pub theta: Vec<f64>,
    pub trace: Vec<f64>,
}

struct Best {
    theta: Vec<f64>,
    value: f64,
}

impl Best {
    fn new(dim: usize) -> Self {
        Self {
            theta: vec![0.0; dim],
            value: f64::INFINITY,
        }
    }

    fn offer(&mut self, theta: &[f64], value: f64) {
        if value < self.value {
            self.value = value;
            self.theta = theta.to_vec();
        }
    }
}

/// Nelder–Mead simplex with the Gao–Han adaptive coefficients, which keep
/// contraction meaningful as the dimension grows. One iteration is one
/// reflect/expand/contract/shrink round.
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    x0: &[f64],
    budget: usize,
) -> Result<OptimRun> {
    let dim = x0.len();
    let dimf = dim as f64;
    let (alpha, beta, gamma, delta) = if dim >= 2 {
        (1.0, 1.0 + 2.0 / dimf, 0.75 - 1.0 / (2.0 * dimf), 1.0 - 1.0 / dimf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    const STEP: f64 = 0.5;

    let mut best = Best::new(dim);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = f(x0)?;
    best.offer(x0, v0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += STEP;
        let v = f(&x)?;
        best.offer(&x, v);
        simplex.push((x, v));
    }

    let mut trace = Vec::with_capacity(budget);
    for _ in 0..budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let worst = simplex[dim].1;
        let second_worst = simplex[dim - 1].1;
        let best_val = simplex[0].1;

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for (x, _) in simplex.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dimf;
            }
        }

        let blend = |from: &[f64], towards: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + towards * (c - x))
                .collect()
        };

        let reflected = blend(&simplex[dim].0, alpha);
        let fr = f(&reflected)?;
        best.offer(&reflected, fr);

        if fr < best_val {
            let expanded = blend(&simplex[dim].0, alpha * beta);
            let fe = f(&expanded)?;
            best.offer(&expanded, fe);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < second_worst {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = if fr < worst {
                blend(&simplex[dim].0, alpha * gamma)
            } else {
                blend(&simplex[dim].0, -gamma)
            };
            let fc = f(&contracted)?;
            best.offer(&contracted, fc);
            if fc < worst.min(fr) {
                simplex[dim] = (contracted, fc);
            } else {
                // Shrink towards the best vertex.
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = anchor
                        .iter()
                        .zip(&entry.0)
                        .map(|(a, x)| a + delta * (x - a))
                        .collect();
                    let v = f(&x)?;
                    best.offer(&x, v);
                    *entry = (x, v);
                }
            }
        }

        let current = simplex.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
        trace.push(current);
        if best.value < CONVERGENCE_EPS {
            break;
        }
    }

    Ok(OptimRun {
        theta: best.theta,
        trace,
    })
}

/// Simultaneous-perturbation stochastic approximation; the noise-tolerant
/// option for shot-based losses. Three evaluations per iteration: the
/// recorded loss at θ_k plus the two perturbed points.
pub fn spsa(
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    x0: &[f64],
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<OptimRun> {
    const A_GAIN: f64 = 0.3;
    const C_GAIN: f64 = 0.15;
    const ALPHA: f64 = 0.602;
    const GAMMA: f64 = 0.101;

    let dim = x0.len();
    let stability = 1.0 + budget as f64 / 10.0;
    let mut theta = x0.to_vec();
    let mut best = Best::new(dim);
    let mut trace = Vec::with_capacity(budget);

    for k in 0..budget {
        let current = f(&theta)?;
        best.offer(&theta, current);
        trace.push(current);
        if best.value < CONVERGENCE_EPS {
            break;
        }

        let ak = A_GAIN / (k as f64 + 1.0 + stability).powf(ALPHA);
        let ck = C_GAIN / (k as f64 + 1.0).powf(GAMMA);
        let delta: Vec<f64> = (0..dim)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
        let fp = f(&plus)?;
        let fm = f(&minus)?;
        best.offer(&plus, fp);
        best.offer(&minus, fm);

        let slope = (fp - fm) / (2.0 * ck);
        for (t, d) in theta.iter_mut().zip(&delta) {
            *t -= ak * slope / d;
        }
    }

    Ok(OptimRun {
        theta: best.theta,
        trace,
    })
}

/// Loss value together with its gradient.
pub type LossAndGrad = (f64, Vec<f64>);

/// Adam on exact gradients. `risk_and_grad` returns the loss at θ together
/// with its full gradient.
pub fn adam(
    risk_and_grad: &mut dyn FnMut(&[f64]) -> Result<LossAndGrad>,
    x0: &[f64],
    budget: usize,
    learning_rate: f64,
) -> Result<OptimRun> {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    let dim = x0.len();
    let mut theta = x0.to_vec();
    let mut m = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    let mut best = Best::new(dim);
    let mut trace = Vec::with_capacity(budget);

    for k in 0..budget {
        let (loss, grad) = risk_and_grad(&theta)?;
        best.offer(&theta, loss);
        trace.push(loss);
        if best.value < CONVERGENCE_EPS {
            break;
        }
        let bias1 = 1.0 - BETA1.powi(k as i32 + 1);
        let bias2 = 1.0 - BETA2.powi(k as i32 + 1);
        for i in 0..dim {
            m[i] = BETA1 * m[i] + (1.0 - BETA1) * grad[i];
            v[i] = BETA2 * v[i] + (1.0 - BETA2) * grad[i] * grad[i];
            theta[i] -= learning_rate * (m[i] / bias1) / ((v[i] / bias2).sqrt() + EPS);
        }
    }

    Ok(OptimRun {
        theta: best.theta,
        trace,
    })
}
