//! Variational model evaluation and training.
//!
//! A [`LinearModel`] is the trainable counterpart of the synthesized
//! observables: embed b, apply a hardware-efficient ansatz W(θ), measure a
//! diagonal observable D. The model output Tr[D W(θ) ρ(b) W†(θ)] equals
//! Tr[O_θ ρ(b)] with O_θ = W†(θ) D W(θ) by cyclicity of the trace, which is
//! how [`LinearModel::extract_spectrum`] reads the trained Fourier
//! coefficients back out.
//!
//! Training minimizes the mean half-squared error over a [`TrainingSet`]
//! with Nelder–Mead (default), SPSA (shot mode), or Adam on parameter-shift
//! gradients.

pub mod optim;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitfourier::{BitVector, FourierSpectrum, FunctionTable};
use crate::embed::{embedding_circuit, EmbeddingKind};
use crate::error::{Error, Result};
use crate::qsim::{sample_expectation, Circuit, DenseObservable, Observable, PauliSum};
use crate::synth::{model_spectrum_phase, model_spectrum_qrac};
use crate::util::fmt_f64;

pub use optim::CONVERGENCE_EPS;

/// Hardware-efficient ansatz: per layer, R_Y and R_Z on every qubit followed
/// by CZ on nearest-neighbour pairs. Parameter order is layer-major,
/// qubit-minor, R_Y before R_Z, giving 2·m·layers parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    m: usize,
    layers: usize,
}

impl Ansatz {
    pub fn new(m: usize, layers: usize) -> Result<Self> {
        if m == 0 || m > crate::qsim::MAX_QUBITS {
            return Err(Error::BadQubitCount {
                m,
                max: crate::qsim::MAX_QUBITS,
            });
        }
        if layers == 0 {
            return Err(Error::ParameterCount {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self { m, layers })
    }

    /// Default depth: 3 layers up to three qubits, 4 beyond.
    pub fn default_layers(m: usize) -> usize {
        if m <= 3 {
            3
        } else {
            4
        }
    }

    pub fn with_default_layers(m: usize) -> Result<Self> {
        Self::new(m, Self::default_layers(m))
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn param_count(&self) -> usize {
        2 * self.m * self.layers
    }

    /// The ansatz circuit with symbolic parameter slots.
    pub fn circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.m).expect("validated at construction");
        let mut slot = 0;
        for _ in 0..self.layers {
            for q in 0..self.m {
                c.ry(q, crate::qsim::Param::Free(slot)).expect("q < m");
                c.rz(q, crate::qsim::Param::Free(slot + 1)).expect("q < m");
                slot += 2;
            }
            for q in 0..self.m.saturating_sub(1) {
                c.cz(q, q + 1).expect("q+1 < m");
            }
        }
        c
    }

    /// Dense W(θ); capped at 10 qubits.
    pub fn unitary(&self, theta: &[f64]) -> Result<crate::qsim::CMatrix> {
        if self.m > 10 {
            return Err(Error::BadQubitCount { m: self.m, max: 10 });
        }
        self.check_theta(theta)?;
        self.circuit().unitary(theta)
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::ParameterCount {
                expected: self.param_count(),
                got: theta.len(),
            });
        }
        Ok(())
    }
}

/// Labelled training pairs (b, y) of consistent input width.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    n: usize,
    pairs: Vec<(BitVector, f64)>,
}

impl TrainingSet {
    pub fn new(pairs: Vec<(BitVector, f64)>) -> Result<Self> {
        let n = pairs
            .first()
            .map(|(b, _)| b.len())
            .ok_or(Error::EmptyTrainingSet)?;
        for (b, _) in &pairs {
            if b.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: b.len(),
                });
            }
        }
        Ok(Self { n, pairs })
    }

    /// The full-cube set {(b, g(b)) | b ∈ 𝔹ⁿ}.
    pub fn full_cube(table: &FunctionTable) -> Self {
        let pairs = BitVector::all(table.n())
            .map(|b| (b, table.get(&b)))
            .collect();
        Self {
            n: table.n(),
            pairs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(BitVector, f64)] {
        &self.pairs
    }
}

/// Optimizer selection for [`optimize`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OptimizerKind {
    NelderMead,
    Spsa,
    Adam { learning_rate: f64 },
}

/// How the initial parameter vector is drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum InitScheme {
    /// Uniform in [−π, π] from the config seed.
    RandomUniform,
    Zeros,
    Fixed(Vec<f64>),
}

/// Training configuration. `shots = 0` means exact expectation values.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    pub budget: usize,
    pub seed: u64,
    pub shots: usize,
    pub init: InitScheme,
}

impl TrainConfig {
    pub fn exact(optimizer: OptimizerKind, budget: usize, seed: u64) -> Self {
        Self {
            optimizer,
            budget,
            seed,
            shots: 0,
            init: InitScheme::RandomUniform,
        }
    }
}

/// A variational linear quantum model: embedding, ansatz, and a diagonal
/// observable D ∈ span{I, Z}^⊗m.
#[derive(Clone, Debug)]
pub struct LinearModel {
    n: usize,
    embedding: EmbeddingKind,
    ansatz: Ansatz,
    observable: PauliSum,
}

impl LinearModel {
    pub fn new(
        n: usize,
        embedding: EmbeddingKind,
        ansatz: Ansatz,
        observable: PauliSum,
    ) -> Result<Self> {
        let m = embedding.qubit_count(n);
        if ansatz.qubits() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: ansatz.qubits(),
            });
        }
        if observable.qubits() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: observable.qubits(),
            });
        }
        if let Some((word, _)) = observable.terms().find(|(w, _)| !w.is_diagonal()) {
            return Err(Error::NotDiagonal {
                word: word.to_string(),
            });
        }
        Ok(Self {
            n,
            embedding,
            ansatz,
            observable,
        })
    }

    /// The experiment default: D = Z^⊗m with the default ansatz depth.
    pub fn z_model(n: usize, embedding: EmbeddingKind, layers: Option<usize>) -> Result<Self> {
        let m = embedding.qubit_count(n);
        let ansatz = match layers {
            Some(l) => Ansatz::new(m, l)?,
            None => Ansatz::with_default_layers(m)?,
        };
        Self::new(n, embedding, ansatz, PauliSum::z_all(m))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn embedding(&self) -> EmbeddingKind {
        self.embedding
    }

    pub fn ansatz(&self) -> &Ansatz {
        &self.ansatz
    }

    pub fn observable(&self) -> &PauliSum {
        &self.observable
    }

    pub fn param_count(&self) -> usize {
        self.ansatz.param_count()
    }

    fn full_circuit(&self, b: &BitVector) -> Result<Circuit> {
        let mut c = embedding_circuit(self.embedding, b)?;
        c.append(&self.ansatz.circuit())?;
        Ok(c)
    }

    /// Exact model output f_θ(b) = Tr[D W(θ) ρ(b) W†(θ)].
    pub fn eval(&self, theta: &[f64], b: &BitVector) -> Result<f64> {
        self.ansatz.check_theta(theta)?;
        self.check_input(b)?;
        let state = self.full_circuit(b)?.run(theta)?;
        self.observable.expectation(&state)
    }

    /// Shot-sampled model output; deterministic for a fixed seed.
    pub fn eval_shots(&self, theta: &[f64], b: &BitVector, shots: usize, seed: u64) -> Result<f64> {
        self.ansatz.check_theta(theta)?;
        self.check_input(b)?;
        sample_expectation(&self.full_circuit(b)?, theta, &self.observable, shots, seed)
    }

    fn check_input(&self, b: &BitVector) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: b.len(),
            });
        }
        Ok(())
    }

    /// Mean half-squared error over the training set (no regularizer).
    pub fn empirical_risk(&self, theta: &[f64], tset: &TrainingSet) -> Result<f64> {
        if tset.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if tset.n() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: tset.n(),
            });
        }
        // Points evaluate independently; collection order fixes the final
        // sum. Small workloads stay serial, where task overhead would
        // dominate the 2^m-amplitude simulations.
        let work = tset.len() << self.ansatz.qubits();
        let per_point: Vec<f64> = if work < 4096 {
            tset.pairs()
                .iter()
                .map(|(b, y)| {
                    let f = self.eval(theta, b)?;
                    Ok(0.5 * (y - f) * (y - f))
                })
                .collect::<Result<_>>()?
        } else {
            tset.pairs()
                .par_iter()
                .map(|(b, y)| {
                    let f = self.eval(theta, b)?;
                    Ok(0.5 * (y - f) * (y - f))
                })
                .collect::<Result<_>>()?
        };
        Ok(per_point.iter().sum::<f64>() / per_point.len() as f64)
    }

    /// Parameter-shift derivative of the model output at `b`:
    /// ∂f/∂θᵢ = ½(f(θᵢ + π/2) − f(θᵢ − π/2)). Exact-expectation only.
    pub fn output_grad(&self, theta: &[f64], index: usize, b: &BitVector) -> Result<f64> {
        self.ansatz.check_theta(theta)?;
        if index >= theta.len() {
            return Err(Error::UnboundParameter {
                slot: index,
                given: theta.len(),
            });
        }
        let mut shifted = theta.to_vec();
        shifted[index] = theta[index] + std::f64::consts::FRAC_PI_2;
        let plus = self.eval(&shifted, b)?;
        shifted[index] = theta[index] - std::f64::consts::FRAC_PI_2;
        let minus = self.eval(&shifted, b)?;
        Ok(0.5 * (plus - minus))
    }

    /// Gradient of the empirical risk via the parameter-shift rule.
    pub fn risk_gradient(&self, theta: &[f64], tset: &TrainingSet) -> Result<Vec<f64>> {
        if tset.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let dim = theta.len();
        let contributions: Vec<Vec<f64>> = tset
            .pairs()
            .par_iter()
            .map(|(b, y)| {
                let f = self.eval(theta, b)?;
                let mut row = Vec::with_capacity(dim);
                for i in 0..dim {
                    row.push((f - y) * self.output_grad(theta, i, b)?);
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let scale = 1.0 / tset.len() as f64;
        Ok((0..dim)
            .map(|i| contributions.iter().map(|row| row[i]).sum::<f64>() * scale)
            .collect())
    }

    /// Dense O_θ = W†(θ) D W(θ); capped at 10 qubits.
    pub fn dense_observable(&self, theta: &[f64]) -> Result<DenseObservable> {
        let w = self.ansatz.unitary(theta)?;
        let d = self.observable.to_dense()?;
        let o = w.adjoint().matmul(&d)?.matmul(&w)?;
        DenseObservable::new(self.ansatz.qubits(), o)
    }

    /// Fourier spectrum of the trained model, read off O_θ. Phase models
    /// yield an n-bit spectrum; QRAC models yield one over the padded
    /// 3⌈n/3⌉-bit cube.
    pub fn extract_spectrum(&self, theta: &[f64]) -> Result<FourierSpectrum> {
        let o = self.dense_observable(theta)?;
        match self.embedding {
            EmbeddingKind::Phase => model_spectrum_phase(&o),
            EmbeddingKind::Qrac => {
                model_spectrum_qrac(&Observable::Dense(o), self.ansatz.qubits())
            }
        }
    }

    /// [`LinearModel::extract_spectrum`] folded back onto the n-bit input
    /// cube (identity for phase models and for n divisible by three).
    pub fn extract_spectrum_restricted(&self, theta: &[f64]) -> Result<FourierSpectrum> {
        let spec = self.extract_spectrum(theta)?;
        if spec.n() == self.n {
            Ok(spec)
        } else {
            crate::synth::restrict_padded(&spec, self.n)
        }
    }
}

/// Training result: best-seen parameters, their risk, and the per-iteration
/// loss history.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub theta: Vec<f64>,
    pub loss_trace: Vec<f64>,
    pub final_risk: f64,
}

/// Minimize the empirical risk of `model` on `tset`. Deterministic for a
/// fixed config in exact mode; runs until the budget is exhausted or the
/// loss drops below [`CONVERGENCE_EPS`] (budget exhaustion returns the best
/// parameters seen, not an error).
pub fn optimize(model: &LinearModel, config: &TrainConfig, tset: &TrainingSet) -> Result<TrainOutcome> {
    if config.budget == 0 {
        return Err(Error::ParameterCount {
            expected: 1,
            got: 0,
        });
    }
    if tset.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let dim = model.param_count();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let x0: Vec<f64> = match &config.init {
        InitScheme::RandomUniform => (0..dim)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect(),
        InitScheme::Zeros => vec![0.0; dim],
        InitScheme::Fixed(theta) => {
            if theta.len() != dim {
                return Err(Error::ParameterCount {
                    expected: dim,
                    got: theta.len(),
                });
            }
            theta.clone()
        }
    };

    let mut shot_counter = 0u64;
    let shots = config.shots;
    let base_seed = config.seed;
    let mut loss = |theta: &[f64]| -> Result<f64> {
        if shots == 0 {
            model.empirical_risk(theta, tset)
        } else {
            let mut acc = 0.0;
            for (b, y) in tset.pairs() {
                shot_counter += 1;
                let f = model.eval_shots(
                    theta,
                    b,
                    shots,
                    base_seed.wrapping_add(shot_counter.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                )?;
                acc += 0.5 * (y - f) * (y - f);
            }
            Ok(acc / tset.len() as f64)
        }
    };

    let run = match config.optimizer {
        OptimizerKind::NelderMead => optim::nelder_mead(&mut loss, &x0, config.budget)?,
        OptimizerKind::Spsa => optim::spsa(&mut loss, &x0, config.budget, &mut rng)?,
        OptimizerKind::Adam { learning_rate } => {
            if shots != 0 {
                return Err(Error::ShotModeGradient);
            }
            let mut fg = |theta: &[f64]| -> Result<(f64, Vec<f64>)> {
                Ok((
                    model.empirical_risk(theta, tset)?,
                    model.risk_gradient(theta, tset)?,
                ))
            };
            optim::adam(&mut fg, &x0, config.budget, learning_rate)?
        }
    };

    // Report the exact risk of the returned parameters.
    let final_risk = model.empirical_risk(&run.theta, tset)?;
    Ok(TrainOutcome {
        theta: run.theta,
        loss_trace: run.trace,
        final_risk,
    })
}

/// CSV with columns `iteration,loss`.
pub fn loss_trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,loss\n");
    for (i, v) in trace.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f64(*v)));
    }
    out
}

/// CSV comparing target and model coefficients over every mask carrying a
/// nonzero value on either side: `mask_binary,target_coeff,model_coeff`.
pub fn spectrum_comparison_csv(target: &FourierSpectrum, model: &FourierSpectrum) -> Result<String> {
    if target.n() != model.n() {
        return Err(Error::LengthMismatch {
            left: target.n(),
            right: model.n(),
        });
    }
    let mut masks: Vec<BitVector> = target.iter().map(|(s, _)| s).collect();
    masks.extend(model.iter().map(|(s, _)| s));
    masks.sort();
    masks.dedup();
    let mut out = String::from("mask_binary,target_coeff,model_coeff\n");
    for s in masks {
        out.push_str(&format!(
            "{s},{},{}\n",
            fmt_f64(target.get(&s)),
            fmt_f64(model.get(&s))
        ));
    }
    Ok(out)
}
