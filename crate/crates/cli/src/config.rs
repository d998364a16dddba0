//! Experiment configuration: a versioned JSON document shared by the `fit`
//! and `synth` subcommands.

use std::str::FromStr;

use serde::Deserialize;

use boolcube_core::bitfourier::{degree, g3, g6, BitVector, FourierSpectrum};
use boolcube_core::embed::Permutation;
use boolcube_core::train::OptimizerKind;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level config document.
///
/// ```json
/// {
///   "schema": 1,
///   "target": {"preset": "g3"},
///   "embedding": "qrac",
///   "optimizer": {"kind": "nelder-mead", "budget": 500, "seed": 7},
///   "shots": 0
/// }
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub target: TargetSpec,
    pub embedding: EmbeddingChoice,
    /// One-based index array for `qrac-permuted`.
    #[serde(default)]
    pub permutation: Option<Vec<usize>>,
    /// Member width d for `ensemble-phase`; defaults to the target degree.
    #[serde(default)]
    pub ensemble_degree: Option<usize>,
    /// Ansatz depth; defaults per qubit count.
    #[serde(default)]
    pub ansatz_layers: Option<usize>,
    #[serde(default = "OptimizerConfig::default")]
    pub optimizer: OptimizerConfig,
    /// 0 = exact expectation values.
    #[serde(default)]
    pub shots: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Preset {
        preset: String,
        #[serde(default)]
        coefficients: Option<Vec<f64>>,
    },
    Inline {
        n: usize,
        terms: Vec<(String, f64)>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingChoice {
    Phase,
    Qrac,
    QracPermuted,
    EnsemblePhase,
    EnsembleQrac,
}

impl EmbeddingChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            EmbeddingChoice::Phase => "phase",
            EmbeddingChoice::Qrac => "qrac",
            EmbeddingChoice::QracPermuted => "qrac-permuted",
            EmbeddingChoice::EnsemblePhase => "ensemble-phase",
            EmbeddingChoice::EnsembleQrac => "ensemble-qrac",
        }
    }
}

// No deny_unknown_fields here: serde cannot combine it with flatten.
#[derive(Debug, Deserialize)]
pub struct OptimizerConfig {
    #[serde(flatten)]
    pub kind: OptimizerKind,
    pub budget: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            kind: OptimizerKind::NelderMead,
            budget: 2000,
            seed: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "schema: unsupported version {}, expected {SCHEMA_VERSION}",
                self.schema
            )));
        }
        if let TargetSpec::Preset {
            preset,
            coefficients,
        } = &self.target
        {
            let want = match preset.as_str() {
                "g3" => 3,
                "g6" => 4,
                other => {
                    return Err(CliError::Usage(format!(
                        "target.preset: unknown preset '{other}' (expected g3 or g6)"
                    )))
                }
            };
            if let Some(c) = coefficients {
                if c.len() != want {
                    return Err(CliError::Usage(format!(
                        "target.coefficients: preset {preset} needs exactly {want} values, got {}",
                        c.len()
                    )));
                }
            }
        }
        if self.embedding == EmbeddingChoice::QracPermuted && self.permutation.is_none() {
            return Err(CliError::Usage(
                "permutation: required for embedding qrac-permuted".into(),
            ));
        }
        if self.permutation.is_some() && self.embedding != EmbeddingChoice::QracPermuted {
            return Err(CliError::Usage(
                "permutation: only valid with embedding qrac-permuted".into(),
            ));
        }
        if self.ensemble_degree.is_some() && self.embedding != EmbeddingChoice::EnsemblePhase {
            return Err(CliError::Usage(
                "ensemble_degree: only valid with embedding ensemble-phase".into(),
            ));
        }
        if self.optimizer.budget == 0 {
            return Err(CliError::Usage("optimizer.budget: must be at least 1".into()));
        }
        if matches!(self.optimizer.kind, OptimizerKind::Adam { .. }) && self.shots != 0 {
            return Err(CliError::Usage(
                "optimizer.kind: adam needs exact mode (shots = 0)".into(),
            ));
        }
        Ok(())
    }

    /// Materialize the target spectrum.
    pub fn target_spectrum(&self) -> Result<FourierSpectrum, CliError> {
        match &self.target {
            TargetSpec::Preset {
                preset,
                coefficients,
            } => {
                let spec = match (preset.as_str(), coefficients) {
                    ("g3", None) => g3(0.5, -0.1, 0.25),
                    ("g3", Some(c)) => g3(c[0], c[1], c[2]),
                    ("g6", None) => g6(-0.2, -0.2, 0.1, 0.1),
                    ("g6", Some(c)) => g6(c[0], c[1], c[2], c[3]),
                    _ => unreachable!("validated"),
                };
                Ok(spec)
            }
            TargetSpec::Inline { n, terms } => {
                let mut spec = FourierSpectrum::empty(*n).map_err(|e| {
                    CliError::Usage(format!("target.n: {e}"))
                })?;
                for (mask, coeff) in terms {
                    let s = BitVector::from_str(mask)
                        .map_err(|e| CliError::Usage(format!("target.terms: mask '{mask}': {e}")))?;
                    if s.len() != *n {
                        return Err(CliError::Usage(format!(
                            "target.terms: mask '{mask}' has length {}, expected n = {n}",
                            s.len()
                        )));
                    }
                    spec.insert(&s, *coeff)
                        .map_err(|e| CliError::Usage(format!("target.terms: {e}")))?;
                }
                Ok(spec)
            }
        }
    }

    /// The validated permutation for `qrac-permuted`, checked against n.
    pub fn permutation(&self, n: usize) -> Result<Permutation, CliError> {
        let map = self
            .permutation
            .clone()
            .expect("presence validated for qrac-permuted");
        if map.len() != n {
            return Err(CliError::Usage(format!(
                "permutation: length {} does not match target width n = {n}",
                map.len()
            )));
        }
        Permutation::new(map).map_err(|e| CliError::Usage(format!("permutation: {e}")))
    }

    /// Member width for `ensemble-phase`.
    pub fn ensemble_width(&self, spec: &FourierSpectrum) -> usize {
        self.ensemble_degree.unwrap_or_else(|| degree(spec).max(1))
    }
}
