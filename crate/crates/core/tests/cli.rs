//! End-to-end checks of the command-line front end: artifact determinism,
//! exit codes, and output shape.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_qnoise");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn quadrature_config() -> &'static str {
    r#"{
        "model": {
            "eps": 1.0,
            "mu_o": {"family": "poly_bump", "n": 1, "half_width": 0.3},
            "mu_d": {"family": "poly_bump", "n": 0, "half_width": 0.1}
        },
        "initial_state": {"rho11": 0.7, "re_rho12": 0.1, "im_rho12": 0.2},
        "time_grid": {"t_min": 1.0, "t_max": 100.0, "points_per_decade": 5}
    }"#
}

#[test]
fn average_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), quadrature_config());
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let res = run(&[
            "average",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            "1",
        ]);
        assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    }
    let a = fs::read(out1.join("average.csv")).unwrap();
    let b = fs::read(out2.join("average.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "quadrature artifacts must be reproducible byte for byte");
}

#[test]
fn monte_carlo_is_deterministic_in_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
            "model": {
                "eps": 1.0,
                "mu_o": {"family": "mirrored_bump", "center": 2.0, "width": 0.5, "n": 1},
                "mu_d": {"family": "poly_bump", "n": 0, "half_width": 0.2}
            },
            "initial_state": {"rho11": 0.6, "re_rho12": 0.2},
            "quadrature": {"monte_carlo": {"samples": 20000}},
            "seed": 7
        }"#,
    );
    let outs: Vec<PathBuf> = (0..3).map(|i| dir.path().join(format!("run{i}"))).collect();
    for (i, out) in outs.iter().enumerate() {
        let mut args = vec![
            "final-state",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        if i == 2 {
            args.extend(["--seed", "8"]);
        }
        let res = run(&args);
        assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    }
    let first = fs::read(outs[0].join("final_state.json")).unwrap();
    let second = fs::read(outs[1].join("final_state.json")).unwrap();
    let reseeded = fs::read(outs[2].join("final_state.json")).unwrap();
    assert_eq!(first, second, "same seed must reproduce the artifact exactly");
    assert_ne!(first, reseeded, "the CLI seed must override the config seed");
}

#[test]
fn exit_codes_separate_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap().to_owned();

    // malformed JSON: config error
    let broken = write_config(dir.path(), "{\"model\": ");
    let res = run(&["average", "--config", broken.to_str().unwrap(), "--out", &out_s]);
    assert_eq!(res.status.code(), Some(2));

    // unknown field: config error
    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, quadrature_config().replace("\"eps\"", "\"epsilon\"")).unwrap();
    let res = run(&["average", "--config", unknown.to_str().unwrap(), "--out", &out_s]);
    assert_eq!(res.status.code(), Some(2));

    // detuning support swallowing the gap: domain error
    let domain = dir.path().join("domain.json");
    fs::write(
        &domain,
        quadrature_config().replace("\"n\": 0, \"half_width\": 0.1", "\"n\": 0, \"half_width\": 1.5"),
    )
    .unwrap();
    let res = run(&["average", "--config", domain.to_str().unwrap(), "--out", &out_s]);
    assert_eq!(res.status.code(), Some(4));

    // evolve without frozen coordinates: config error
    let cfg = write_config(dir.path(), quadrature_config());
    let res = run(&["evolve", "--config", cfg.to_str().unwrap(), "--out", &out_s]);
    assert_eq!(res.status.code(), Some(2));

    // rate-fit without a fit window: config error
    let res = run(&["rate-fit", "--config", cfg.to_str().unwrap(), "--out", &out_s]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn validate_subcommand_reports_all_green() {
    let res = run(&["validate"]);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(res.status.success(), "stdout: {stdout}");
    assert!(stdout.contains(", 0 failed"), "stdout: {stdout}");
}

#[test]
fn evolve_writes_versioned_grid_with_conserved_purity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &quadrature_config().replace(
            "\"time_grid\"",
            "\"frozen\": {\"x\": 0.3, \"y\": 0.1}, \"time_grid\"",
        ),
    );
    let out = dir.path().join("out");
    let res = run(&["evolve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let body = fs::read_to_string(out.join("evolve.csv")).unwrap();
    let mut lines = body.lines();
    assert!(lines.next().unwrap().starts_with("# qnoise v"));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next().unwrap(), "t,rho11,re_rho12,im_rho12,purity");
    let rows: Vec<&str> = lines.collect();
    // two decades at five points per decade, endpoints included
    assert_eq!(rows.len(), 11);
    let purities: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    for p in &purities {
        assert!((p - purities[0]).abs() < 1e-12, "purity must stay constant");
    }
}

#[test]
fn regime_check_reports_classification_and_dephasing_distances() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), quadrature_config());
    let out = dir.path().join("out");
    let res = run(&[
        "regime-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("regime_check.json")).unwrap()).unwrap();
    assert!(doc["regime"].is_string());
    assert!(doc["nu1"].as_f64().unwrap() > 0.0);
    for key in ["dist_energy_basis", "dist_delocalized_basis"] {
        let d = doc[key].as_f64().unwrap();
        assert!(d.is_finite() && d >= 0.0, "{key} = {d}");
    }
    assert_eq!(doc["config"]["initial_state"]["rho11"].as_f64(), Some(0.7));
}

#[test]
fn rate_fit_extracts_the_coherence_decay_law() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
            "model": {
                "eps": 1.0,
                "mu_o": {"family": "poly_bump", "n": 2, "half_width": 0.3},
                "mu_d": {"family": "zero"}
            },
            "initial_state": {"rho11": 0.7, "re_rho12": 0.1, "im_rho12": 0.2},
            "time_grid": {"t_min": 100.0, "t_max": 1000.0, "points_per_decade": 30},
            "fit_window": [100.0, 1000.0]
        }"#,
    );
    let out = dir.path().join("out");
    let res = run(&["rate-fit", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    assert!(out.join("deviations.csv").exists());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("rate_fit.json")).unwrap()).unwrap();
    let exponent = doc["exponent"].as_f64().unwrap();
    assert!(
        (0.3..=0.8).contains(&exponent),
        "coupling-only coherent decay should fit near 1/2, got {exponent}"
    );
    assert!(doc["r_squared"].as_f64().unwrap() > 0.9);
    assert_eq!(doc["non_convergent"].as_bool(), Some(false));
    assert_eq!(doc["config"]["model"]["eps"].as_f64(), Some(1.0));
}
