//! The `fit` subcommand: train a variational model on the full cube of a
//! target spectrum and report loss, values, and recovered coefficients.

use std::path::Path;
use std::time::Instant;

use boolcube_core::bitfourier::{wht_inverse, BitVector, FourierSpectrum};
use boolcube_core::embed::EmbeddingKind;
use boolcube_core::train::{
    loss_trace_csv, optimize, spectrum_comparison_csv, InitScheme, LinearModel, TrainConfig,
    TrainingSet,
};
use boolcube_core::util::fmt_f64;

use crate::config::{EmbeddingChoice, ExperimentConfig};
use crate::{write_report, CliError};

pub fn run(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let target = config.target_spectrum()?;
    let n = target.n();

    let (kind, tau) = match config.embedding {
        EmbeddingChoice::Phase => (EmbeddingKind::Phase, None),
        EmbeddingChoice::Qrac => (EmbeddingKind::Qrac, None),
        EmbeddingChoice::QracPermuted => {
            (EmbeddingKind::Qrac, Some(config.permutation(n)?))
        }
        EmbeddingChoice::EnsemblePhase | EmbeddingChoice::EnsembleQrac => {
            return Err(CliError::Usage(
                "embedding: fit supports phase, qrac, and qrac-permuted; use synth for ensembles"
                    .into(),
            ))
        }
    };

    let table = wht_inverse(&target);
    // A τ-permuted model Tr[O ρ(τ(b))] is a plain model trained on the
    // permuted inputs.
    let pairs: Vec<(BitVector, f64)> = BitVector::all(n)
        .map(|b| {
            let x = match &tau {
                Some(t) => t.apply(&b).expect("lengths validated"),
                None => b,
            };
            (x, table.get(&b))
        })
        .collect();
    let tset = TrainingSet::new(pairs)?;

    let model = LinearModel::z_model(n, kind, config.ansatz_layers)?;
    let train_config = TrainConfig {
        optimizer: config.optimizer.kind,
        budget: config.optimizer.budget,
        seed: config.optimizer.seed,
        shots: config.shots,
        init: InitScheme::RandomUniform,
    };

    let started = Instant::now();
    let outcome = optimize(&model, &train_config, &tset)?;
    let wall = started.elapsed().as_secs_f64();

    write_report(out, "loss.csv", &loss_trace_csv(&outcome.loss_trace))?;

    // Per-input target vs (exact) model values, in target input order.
    let mut values = String::from("mask_binary,target,model\n");
    for b in BitVector::all(n) {
        let x = match &tau {
            Some(t) => t.apply(&b)?,
            None => b,
        };
        let f = model.eval(&outcome.theta, &x)?;
        values.push_str(&format!("{b},{},{}\n", fmt_f64(table.get(&b)), fmt_f64(f)));
    }
    write_report(out, "values.csv", &values)?;

    let extracted = model.extract_spectrum_restricted(&outcome.theta)?;
    let model_spectrum = match &tau {
        None => extracted,
        Some(t) => {
            // Coefficients live in permuted input space; map masks back so
            // they compare against the target's.
            let inv = t.inverse();
            let mut back = FourierSpectrum::empty(n)?;
            for (u, c) in extracted.iter() {
                back.insert(&inv.apply(&u)?, c)?;
            }
            back
        }
    };
    write_report(
        out,
        "spectrum.csv",
        &spectrum_comparison_csv(&target, &model_spectrum)?,
    )?;

    let summary = serde_json::json!({
        "schema": crate::config::SCHEMA_VERSION,
        "command": "fit",
        "n": n,
        "embedding": config.embedding.as_str(),
        "final_risk": outcome.final_risk,
        "iterations": outcome.loss_trace.len(),
        "seed": config.optimizer.seed,
        "shots": config.shots,
        "wall_time_seconds": wall,
    });
    write_report(
        out,
        "summary.json",
        &format!("{}\n", serde_json::to_string_pretty(&summary).expect("plain json")),
    )?;

    println!(
        "fit: final risk {:.3e} after {} iterations ({:.2}s); reports in {}",
        outcome.final_risk,
        outcome.loss_trace.len(),
        wall,
        out.display()
    );
    Ok(())
}
