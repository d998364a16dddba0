//! End-to-end tests of the `boolcube-vqml` binary: exit codes, report
//! files, and byte-level reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boolcube-vqml"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_summary(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("summary.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn fit_g3_qrac_reaches_low_risk() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"preset":"g3"},"embedding":"qrac",
            "optimizer":{"kind":"nelder-mead","budget":500,"seed":7}}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["fit", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");

    let summary = read_summary(&out);
    assert!(summary["final_risk"].as_f64().unwrap() < 1e-4);
    assert_eq!(summary["n"], 3);

    // values.csv: one row per input plus header.
    let values = std::fs::read_to_string(out.join("values.csv")).unwrap();
    assert_eq!(values.lines().count(), 9);
    assert!(values.starts_with("mask_binary,target,model\n"));

    // spectrum.csv covers every mask with a nonzero coefficient on either
    // side; the three targets are all present.
    let spectrum = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    for mask in ["100,", "010,", "001,"] {
        assert!(spectrum.contains(mask), "missing {mask} in {spectrum}");
    }

    let loss = std::fs::read_to_string(out.join("loss.csv")).unwrap();
    assert!(loss.starts_with("iteration,loss\n"));
    assert_eq!(loss.lines().count(), 501);
}

#[test]
fn fit_g6_qrac_reaches_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"preset":"g6"},"embedding":"qrac",
            "optimizer":{"kind":"nelder-mead","budget":4000,"seed":3}}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["fit", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    assert!(read_summary(&out)["final_risk"].as_f64().unwrap() < 1e-3);
}

#[test]
fn fit_empty_target_is_trivial() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"n":2,"terms":[]},"embedding":"phase",
            "optimizer":{"kind":"nelder-mead","budget":800,"seed":1}}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["fit", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    // θ = 0 already realizes the zero function; training just has to find
    // something equivalent.
    assert!(read_summary(&out)["final_risk"].as_f64().unwrap() < 1e-6);
}

#[test]
fn fit_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"preset":"g3"},"embedding":"phase",
            "optimizer":{"kind":"nelder-mead","budget":300,"seed":12}}"#,
    );
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out in [&out_a, &out_b] {
        let result = run(&["fit", "--config", &config, "--out", out.to_str().unwrap()]);
        assert!(result.status.success());
    }
    for name in ["loss.csv", "values.csv", "spectrum.csv"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn fit_qrac_permuted_handles_shifted_support() {
    let tmp = tempfile::tempdir().unwrap();
    // χ on bits {1,2} is outside 𝒦^QE₂ unpermuted; the cyclic shift makes
    // it reachable. Coefficient 1/3 keeps the target inside the spectrum of
    // W†(Z⊗Z)W, so the fit can go all the way down.
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,
            "target":{"n":6,"terms":[["110000",0.3333333333333333]]},
            "embedding":"qrac-permuted",
            "permutation":[2,3,4,5,6,1],
            "optimizer":{"kind":"nelder-mead","budget":3000,"seed":2}}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["fit", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    assert!(read_summary(&out)["final_risk"].as_f64().unwrap() < 1e-3);

    // The reported spectrum is mapped back to target-space masks.
    let spectrum = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let row = spectrum
        .lines()
        .find(|l| l.starts_with("110000,"))
        .expect("target mask row");
    let fields: Vec<&str> = row.split(',').collect();
    let model: f64 = fields[2].parse().unwrap();
    assert!((model - 1.0 / 3.0).abs() < 0.05, "{row}");
}

#[test]
fn fit_shot_mode_with_spsa() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"preset":"g3"},"embedding":"qrac",
            "optimizer":{"kind":"spsa","budget":200,"seed":5},
            "shots":4096}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["fit", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    let summary = read_summary(&out);
    assert_eq!(summary["shots"], 4096);
    // Shot noise caps the achievable precision; the fit still has to land
    // in the right neighbourhood.
    assert!(summary["final_risk"].as_f64().unwrap() < 0.05);
}

#[test]
fn synth_qrac_permuted_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,
            "target":{"n":6,"terms":[["110000",0.8]]},
            "embedding":"qrac-permuted",
            "permutation":[2,3,4,5,6,1]}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["synth", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    assert!(read_summary(&out)["max_abs_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn synth_ensemble_phase_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"preset":"g6"},"embedding":"ensemble-phase",
            "ensemble_degree":2}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["synth", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    let summary = read_summary(&out);
    assert!(summary["max_abs_error"].as_f64().unwrap() < 1e-10);
    assert_eq!(summary["members"], 4);
}

#[test]
fn synth_g3_phase_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"preset":"g3"},"embedding":"phase"}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["synth", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    let summary = read_summary(&out);
    assert!(summary["max_abs_error"].as_f64().unwrap() < 1e-10);

    let verify = std::fs::read_to_string(out.join("verify.csv")).unwrap();
    assert_eq!(verify.lines().count(), 9);

    // The model document loads back and is a one-member phase ensemble.
    let doc = std::fs::read_to_string(out.join("model.json")).unwrap();
    let model = boolcube_core::synth::EnsembleModel::from_json(&doc).unwrap();
    assert_eq!(model.members().len(), 1);
}

#[test]
fn synth_ensemble_qrac_random_degree_two() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,
            "target":{"n":6,"terms":[["100100",0.3],["010010",-0.2],["000001",0.15],["001000",0.05]]},
            "embedding":"ensemble-qrac"}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["synth", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    assert!(read_summary(&out)["max_abs_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn synth_rejects_unreachable_qrac_support() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"n":3,"terms":[["110",1.0]]},"embedding":"qrac"}"#,
    );
    let out = tmp.path().join("report");
    let result = run(&["synth", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("110"), "offending mask missing: {stderr}");
}

#[test]
fn verify_suites_and_exit_codes() {
    let ok = run(&["verify", "thm1"]);
    assert!(ok.status.success());
    let stdout = String::from_utf8_lossy(&ok.stdout);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["passed"], true);

    let unknown = run(&["verify", "definitely-not-a-suite"]);
    assert_eq!(unknown.status.code(), Some(2));

    // Report file lands in --out.
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("report");
    let ok = run(&["verify", "kernel", "--out", out.to_str().unwrap()]);
    assert!(ok.status.success());
    assert!(out.join("report.json").exists());
}

#[test]
fn config_errors_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"schema":2,"target":{"preset":"g3"},"embedding":"qrac"}"#,
        r#"{"schema":1,"target":{"preset":"g7"},"embedding":"qrac"}"#,
        r#"{"schema":1,"target":{"preset":"g3"},"embedding":"ensemble-phase","permutation":[1,2,3]}"#,
        r#"{"schema":1,"target":{"preset":"g3"},"embedding":"fancy"}"#,
        r#"{"schema":1,"target":{"n":3,"terms":[["10",1.0]]},"embedding":"phase"}"#,
    ];
    for (i, body) in cases.iter().enumerate() {
        let config = write_config(tmp.path(), &format!("bad{i}.json"), body);
        let out = tmp.path().join(format!("out{i}"));
        let result = run(&["fit", "--config", &config, "--out", out.to_str().unwrap()]);
        assert_eq!(result.status.code(), Some(2), "case {i}: {result:?}");
        assert!(!result.stderr.is_empty());
    }

    // Fitting an ensemble embedding is a usage error too.
    let config = write_config(
        tmp.path(),
        "ens.json",
        r#"{"schema":1,"target":{"preset":"g3"},"embedding":"ensemble-qrac"}"#,
    );
    let out = tmp.path().join("ens");
    let result = run(&["fit", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn thread_cap_env_var() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cfg.json",
        r#"{"schema":1,"target":{"preset":"g3"},"embedding":"qrac",
            "optimizer":{"kind":"nelder-mead","budget":50,"seed":1}}"#,
    );
    let out = tmp.path().join("report");
    let result = Command::new(env!("CARGO_BIN_EXE_boolcube-vqml"))
        .env("BOOLCUBE_THREADS", "1")
        .args(["fit", "--config", &config, "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(result.status.success(), "{result:?}");

    let bad = Command::new(env!("CARGO_BIN_EXE_boolcube-vqml"))
        .env("BOOLCUBE_THREADS", "zero")
        .args(["verify", "thm1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
