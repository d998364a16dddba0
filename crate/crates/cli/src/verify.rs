//! The `verify` subcommand: on-demand property suites for the synthesis
//! constructions, embedding extensions, and the kernel baseline, with
//! counterexample dumps on failure.

use std::path::Path;

use serde::Serialize;

use boolcube_core::bitfourier::{
    inner_product, parity_chi, random_low_degree, wht_forward, wht_inverse, BitVector,
    FourierSpectrum, FunctionTable,
};
use boolcube_core::embed::{
    double_qrac_embed, hadamard_wall, phase_embed, qrac_embed, repeated_phase_embed,
    swap_network_layer, EmbeddingKind, Permutation, QracAngles, SubsetSelector, Triplet,
};
use boolcube_core::kernel::{fidelity_kernel, kernel_matrix, krr_fit, krr_predict};
use boolcube_core::qsim::{random_circuit, DenseObservable};
use boolcube_core::synth::{
    ensemble_phase, ensemble_qrac, kqe_set, phase_multiplicity, synth_phase_obs, synth_qrac_obs,
    synth_qrac_permuted,
};

use crate::{write_report, CliError};

pub const SUITES: &[&str] = &[
    "fourier",
    "thm1",
    "thm2",
    "thm3",
    "thm4",
    "thm5",
    "appendixA1",
    "appendixA2",
    "appendixB",
    "kernel",
];

#[derive(Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            passed: true,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn case(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            self.failures.push(detail());
        }
    }
}

pub fn run(suite: &str, out: Option<&Path>) -> Result<(), CliError> {
    let report = match suite {
        "fourier" => fourier(),
        "thm1" => thm1(),
        "thm2" => thm2(),
        "thm3" => thm3(),
        "thm4" => thm4(),
        "thm5" => thm5(),
        "appendixA1" => appendix_a1(),
        "appendixA2" => appendix_a2(),
        "appendixB" => appendix_b(),
        "kernel" => kernel_suite(),
        other => {
            return Err(CliError::Usage(format!(
                "suite: unknown suite '{other}' (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("plain json");
    println!("{json}");
    if let Some(dir) = out {
        write_report(dir, "report.json", &format!("{json}\n"))?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "suite {suite}: {} of {} cases failed",
            report.failures.len(),
            report.cases
        )))
    }
}

fn fourier() -> SuiteReport {
    let mut report = SuiteReport::new("fourier");
    for n in 1..=5usize {
        let tables: Vec<FunctionTable> = BitVector::all(n)
            .map(|s| FunctionTable::from_fn(n, |b| parity_chi(&s, &b).unwrap()).unwrap())
            .collect();
        for (i, f) in tables.iter().enumerate() {
            for (j, g) in tables.iter().enumerate() {
                let ip = inner_product(f, g).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                report.case(ip == want, || {
                    format!("orthonormality n={n} s#{i} t#{j}: got {ip}")
                });
            }
        }
    }
    for n in 1..=8usize {
        let spec = random_low_degree(n, n.min(3), (2 * n).min(6), 300 + n as u64).unwrap();
        let table = wht_inverse(&spec);
        let back = wht_forward(&table);
        let mut worst: f64 = 0.0;
        for s in BitVector::all(n) {
            worst = worst.max((back.get(&s) - spec.get(&s)).abs());
        }
        report.case(worst <= 1e-12, || {
            format!("roundtrip n={n}: worst deviation {worst:e}")
        });
        let parseval = (back.power() - inner_product(&table, &table).unwrap()).abs();
        report.case(parseval <= 1e-10, || {
            format!("parseval n={n}: deviation {parseval:e}")
        });
    }
    report
}

fn thm1() -> SuiteReport {
    let mut report = SuiteReport::new("thm1");
    for n in 2..=5usize {
        for trial in 0..12u64 {
            let terms = 1 + (trial as usize % (1usize << n).min(6));
            let spec = random_low_degree(n, n, terms, 400 + 50 * n as u64 + trial).unwrap();
            let table = wht_inverse(&spec);
            let o = synth_phase_obs(&spec).unwrap();
            let mut worst: f64 = 0.0;
            let mut at = BitVector::zeros(n).unwrap();
            for b in BitVector::all(n) {
                let err = (o.expectation(&phase_embed(&b).unwrap()).unwrap() - table.get(&b)).abs();
                if err > worst {
                    worst = err;
                    at = b;
                }
            }
            report.case(worst < 1e-9, || {
                format!("n={n} trial={trial}: |model − target| = {worst:e} at b={at}")
            });
        }
    }
    report
}

fn thm2() -> SuiteReport {
    let mut report = SuiteReport::new("thm2");

    // Multiplicities against exhaustive subset counts.
    use itertools::Itertools;
    for n in 1..=6usize {
        for d in 1..=n {
            let subsets: Vec<u32> = (1..=n)
                .combinations(d)
                .map(|w| w.iter().map(|&i| 1u32 << (i - 1)).sum())
                .collect();
            for s in BitVector::all(n) {
                if s.weight() as usize > d {
                    continue;
                }
                let direct = subsets.iter().filter(|&&w| s.mask() & !w == 0).count() as u64;
                let formula = phase_multiplicity(n, d, &s);
                report.case(formula == direct, || {
                    format!("k_s mismatch n={n} d={d} s={s}: {formula} vs {direct}")
                });
            }
        }
    }

    // Ensemble exactness on random low-degree targets.
    for trial in 0..10u64 {
        let n = 4 + (trial as usize % 3);
        let d = 2;
        let spec = random_low_degree(n, d, 4, 500 + trial).unwrap();
        let ensemble = ensemble_phase(&spec, d).unwrap();
        let table = wht_inverse(&spec);
        let mut worst: f64 = 0.0;
        for b in BitVector::all(n) {
            worst = worst.max((ensemble.eval(&b).unwrap() - table.get(&b)).abs());
        }
        report.case(worst < 1e-9, || {
            format!("ensemble n={n} trial={trial}: worst {worst:e}")
        });
    }
    report
}

fn thm3() -> SuiteReport {
    let mut report = SuiteReport::new("thm3");
    for m in 1..=2usize {
        let set = kqe_set(m).unwrap();
        for trial in 0..25u64 {
            let mut spec = FourierSpectrum::empty(3 * m).unwrap();
            // Deterministic subset of 𝒦^QE masks.
            for (i, s) in set.masks().iter().enumerate() {
                if (trial + i as u64).is_multiple_of(3) {
                    spec.insert(s, 0.1 + ((trial as f64) * 0.07 + i as f64 * 0.05).sin())
                        .unwrap();
                }
            }
            if spec.is_empty() {
                continue;
            }
            let table = wht_inverse(&spec);
            let o = synth_qrac_obs(&spec).unwrap();
            let mut worst: f64 = 0.0;
            for b in BitVector::all(3 * m) {
                let state = qrac_embed(&b, &QracAngles::default()).unwrap();
                worst = worst.max((o.expectation(&state).unwrap() - table.get(&b)).abs());
            }
            report.case(worst < 1e-9, || {
                format!("m={m} trial={trial}: worst {worst:e}")
            });
        }
    }
    report
}

fn thm4() -> SuiteReport {
    let mut report = SuiteReport::new("thm4");
    let taus = Permutation::all(6);
    let set = kqe_set(2).unwrap();
    for trial in 0..15usize {
        let tau = taus[(trial * 97) % taus.len()].clone();
        let inv = tau.inverse();
        let mut spec = FourierSpectrum::empty(6).unwrap();
        for (i, u) in set.masks().iter().enumerate() {
            if (trial + i) % 4 == 0 {
                spec.insert(&inv.apply(u).unwrap(), 0.2 + (i as f64 * 0.11).cos())
                    .unwrap();
            }
        }
        if spec.is_empty() {
            continue;
        }
        let (tau, o) = synth_qrac_permuted(&spec, &tau).unwrap();
        let table = wht_inverse(&spec);
        let mut worst: f64 = 0.0;
        for b in BitVector::all(6) {
            let state = qrac_embed(&tau.apply(&b).unwrap(), &QracAngles::default()).unwrap();
            worst = worst.max((o.expectation(&state).unwrap() - table.get(&b)).abs());
        }
        report.case(worst < 1e-9, || {
            format!("trial={trial} tau={:?}: worst {worst:e}", tau.map())
        });
    }
    report
}

fn thm5() -> SuiteReport {
    let mut report = SuiteReport::new("thm5");
    for trial in 0..4u64 {
        let spec = random_low_degree(6, 2, 4 + trial as usize, 700 + trial).unwrap();
        let ensemble = ensemble_qrac(&spec).unwrap();
        let table = wht_inverse(&spec);
        let mut worst: f64 = 0.0;
        for b in BitVector::all(6) {
            worst = worst.max((ensemble.eval(&b).unwrap() - table.get(&b)).abs());
        }
        report.case(worst < 1e-9, || {
            format!("trial={trial}: worst {worst:e}")
        });
    }
    report
}

fn appendix_a1() -> SuiteReport {
    let mut report = SuiteReport::new("appendixA1");
    let partition = [
        SubsetSelector::new(4, vec![1, 2]).unwrap(),
        SubsetSelector::new(4, vec![3, 4]).unwrap(),
    ];
    for seed in 0..5u64 {
        let interleave = [
            hadamard_wall(2).unwrap(),
            random_circuit(2, 2, 9_000 + seed).unwrap(),
        ];
        let o = DenseObservable::random(2, 9_500 + seed).unwrap();
        let table = FunctionTable::from_fn(4, |b| {
            let c = repeated_phase_embed(&b, &partition, &interleave).unwrap();
            o.expectation(&c.run(&[]).unwrap()).unwrap()
        })
        .unwrap();
        let spec = wht_forward(&table);
        let coeff = spec.get(&"1111".parse().unwrap()).abs();
        report.case(coeff > 1e-6, || {
            format!("seed={seed}: weight-4 coefficient {coeff:e}")
        });
    }
    report
}

fn appendix_a2() -> SuiteReport {
    let mut report = SuiteReport::new("appendixA2");
    for seed in 0..20u64 {
        let o = DenseObservable::random(1, 10_000 + seed).unwrap();
        let table = FunctionTable::from_fn(3, |b| {
            let t = Triplet::new(b.get(0), b.get(1), b.get(2));
            o.expectation(&double_qrac_embed(&t).unwrap()).unwrap()
        })
        .unwrap();
        let spec = wht_forward(&table);
        let weakest = BitVector::all(3)
            .map(|s| spec.get(&s).abs())
            .fold(f64::INFINITY, f64::min);
        report.case(weakest > 1e-6, || {
            format!("seed={seed}: weakest coefficient {weakest:e}")
        });
    }
    report
}

fn appendix_b() -> SuiteReport {
    let mut report = SuiteReport::new("appendixB");
    let m = 4;
    let pairs = boolcube_core::embed::pair_order(m);

    // Where does input position i land? Read it off the one-hot basis runs.
    let landing = |layer: &boolcube_core::qsim::Circuit, i: usize| -> Option<usize> {
        let mut prep = boolcube_core::qsim::Circuit::new(m).unwrap();
        prep.x(i).unwrap();
        prep.append(layer).unwrap();
        let probs = prep.run(&[]).unwrap().probabilities();
        let j = (0..probs.len()).find(|&j| probs[j] > 0.998)?;
        Some((j as u32).trailing_zeros() as usize)
    };

    for a in 0..m {
        for b in a + 1..m {
            let mut found = false;
            'settings: for setting in 0..1u32 << pairs.len() {
                let betas: Vec<f64> = (0..pairs.len())
                    .map(|i| {
                        if setting >> i & 1 == 1 {
                            std::f64::consts::PI
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let layer = swap_network_layer(m, &betas).unwrap();
                let mut position = [0usize; 4];
                for (i, slot) in position.iter_mut().enumerate() {
                    match landing(&layer, i) {
                        Some(j) => *slot = j,
                        None => continue 'settings,
                    }
                }
                if position[a].min(position[b]) == 0 && position[a].max(position[b]) == 1 {
                    found = true;
                    break;
                }
            }
            report.case(found, || format!("subset {{{},{}}} not routable", a + 1, b + 1));
        }
    }
    report
}

fn kernel_suite() -> SuiteReport {
    let mut report = SuiteReport::new("kernel");

    let inputs: Vec<BitVector> = BitVector::all(3).collect();
    let gram = kernel_matrix(&inputs, EmbeddingKind::Qrac).unwrap();
    let min_eig = gram.min_eigenvalue();
    report.case(min_eig >= -1e-9, || format!("gram min eigenvalue {min_eig:e}"));

    let table = wht_inverse(&boolcube_core::bitfourier::g3(0.5, -0.1, 0.25));
    let y: Vec<f64> = inputs.iter().map(|b| table.get(b)).collect();
    let alpha = krr_fit(&gram, &y, 0.0).unwrap();
    for (b, want) in inputs.iter().zip(&y) {
        let got = krr_predict(&alpha, &inputs, b, EmbeddingKind::Qrac).unwrap();
        report.case((got - want).abs() <= 1e-8, || {
            format!("interpolation at b={b}: |{got} − {want}|")
        });
    }

    for (i, b1) in inputs.iter().enumerate() {
        for (j, b2) in inputs.iter().enumerate() {
            let k = fidelity_kernel(b1, b2, EmbeddingKind::Phase).unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            report.case(k == want, || format!("phase kernel ({b1},{b2}) = {k}"));
        }
    }
    report
}
