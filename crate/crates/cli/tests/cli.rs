//! End-to-end runs of the `qcd` binary on the fixture files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn qcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcd"))
        .args(args)
        .output()
        .expect("qcd runs")
}

fn qcd_with_threads(args: &[&str], threads: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcd"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .output()
        .expect("qcd runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn f(path: &str) -> String {
    fixture(path).display().to_string()
}

fn value(out: &Output) -> f64 {
    json(out)["value"].as_f64().expect("numeric value")
}

#[test]
fn valid_fixtures_validate() {
    for name in ["identity.qc", "dephase.qc", "z.qc", "hadamard.qc", "cz2.qc"] {
        let out = qcd(&["validate", &f(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(json(&out)["valid"], true);
    }
}

#[test]
fn liveness_violation_is_named() {
    let out = qcd(&["validate", &f("not_live.qc")]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["valid"], false);
    assert!(report["errors"][0].as_str().unwrap().contains("wire 1 is not live"));
}

#[test]
fn syntax_errors_fail_validation() {
    let out = qcd(&["validate", &f("syntax.qc")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["stage"], "parse");
}

#[test]
fn corrupting_a_unitary_fails_admissibility() {
    let text = std::fs::read_to_string(fixture("hadamard.qc")).unwrap();
    let corrupted = text.replacen("-0.7071067811865476,0", "-0.7071067811865476,0.001", 1);
    assert_ne!(text, corrupted);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corrupted.qc");
    std::fs::write(&path, corrupted).unwrap();
    let out = qcd(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["stage"], "admissibility");
    assert!(report["errors"][0].as_str().unwrap().contains("not unitary"));
}

#[test]
fn state_distances() {
    let out = qcd(&["distance", "trace", &f("zero.json"), &f("one.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(value(&out), 2.0);
    let out = qcd(&["distance", "fidelity", &f("zero.json"), &f("zero.json")]);
    assert_eq!(value(&out), 1.0);
}

#[test]
fn dimension_mismatch_is_a_usage_error() {
    let out = qcd(&["distance", "trace", &f("zero.json"), &f("zero2.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = qcd(&["distance", "dnorm", &f("identity.qc"), &f("cz2.qc")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_rejected() {
    let out = qcd(&["validate", &f("identity.qc"), "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qcd(&["distance", "dnorm", &f("identity.qc"), &f("dephase.qc"), "--restarts", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diamond_norm_of_dephasing() {
    let out = qcd(&["distance", "dnorm", &f("identity.qc"), &f("dephase.qc"), "--restarts", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let w = json(&out);
    assert!((w["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(w["converged"], true);
    assert_eq!(w["psi"].as_array().unwrap().len(), 4);
    assert_eq!(w["measurement"]["rows"], 4);
}

#[test]
fn instance_files_feed_pair_commands() {
    let out = qcd(&["distance", "maxfid", &f("qcd_dephase.json"), "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((value(&out) - 1.0).abs() < 1e-9);
}

#[test]
fn iteration_limit_reports_non_convergence() {
    let out = qcd(&["distance", "dnorm", &f("identity.qc"), &f("dephase.qc"), "--restarts", "1", "--max-iters", "1"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["converged"], false);
}

#[test]
fn reduction_appends_one_decohere() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcd(&["reduce", "ci2qcd", &f("ci_identity.json"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r0 = std::fs::read_to_string(dir.path().join("r0.qc")).unwrap();
    let r1 = std::fs::read_to_string(dir.path().join("r1.qc")).unwrap();
    let body = |t: &str| t.lines().skip(1).map(str::to_string).collect::<Vec<_>>();
    let (b0, b1) = (body(&r0), body(&r1));
    assert_eq!(b1.len(), b0.len() + 1);
    assert_eq!(b1[..b1.len() - 2], b0[..b0.len() - 1]);
    assert_eq!(b1[b1.len() - 2], "decohere 0");
    assert_eq!(b1.last().unwrap(), "end");
    for file in ["r0.qc", "r1.qc"] {
        let v = qcd(&["validate", dir.path().join(file).to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(0));
    }
    // Identical identities have fully overlapping images.
    let inst = dir.path().join("instance.json");
    let out = qcd(&["distance", "dnorm", inst.to_str().unwrap(), "--restarts", "8"]);
    assert!((value(&out) - 1.0).abs() < 1e-6);
}

#[test]
fn parity_then_distance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = qcd(&["reduce", "parity", &f("qcd_dephase.json"), "--k", "2", "--out", d]);
    assert_eq!(out.status.code(), Some(0));
    let r0 = dir.path().join("r0.qc");
    let r1 = dir.path().join("r1.qc");
    let out = qcd(&["distance", "dnorm", r0.to_str().unwrap(), r1.to_str().unwrap(), "--restarts", "8"]);
    assert!((value(&out) - 0.5).abs() < 1e-4);
}

#[test]
fn default_polarization_is_refused_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcd(&["reduce", "polarize", &f("qcd_dephase.json"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let refusal = json(&out);
    assert_eq!(refusal["counts"]["r"], 4);
    assert_eq!(refusal["counts"]["s"], 1024);
    assert_eq!(refusal["counts"]["t"], 1);
    assert_eq!(refusal["certificate"]["stages"][1]["params"]["k"], 1024);
    assert!(!dir.path().join("s0.qc").exists());
}

#[test]
fn overridden_polarization_emits_valid_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcd(&[
        "reduce",
        "polarize",
        &f("qcd_dephase.json"),
        "--override",
        "2,1,1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["certificate"]["stages"].as_array().unwrap().len(), 3);
    for file in ["s0.qc", "s1.qc"] {
        let v = qcd(&["validate", dir.path().join(file).to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(0));
    }
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert, report["certificate"]);
}

#[test]
fn protocol_examples() {
    let out = qcd(&["protocol", &f("qcd_same.json"), "--trials", "10000", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!((r["estimate"].as_f64().unwrap() - 0.5).abs() < 0.02);

    let out = qcd(&["protocol", &f("qcd_z.json"), "--restarts", "4"]);
    assert!((json(&out)["p_accept_exact"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let out = qcd(&["protocol", &f("qcd_dephase.json"), "--restarts", "8"]);
    let r = json(&out);
    assert!((r["p_accept_exact"].as_f64().unwrap() - 0.75).abs() < 1e-6);
    assert_eq!(r["trials"], 10000);
}

#[test]
fn protocol_accepts_a_supplied_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strategy.json");
    // |0⟩ in, answer 0 always: accepted half the time whatever the circuits.
    std::fs::write(
        &path,
        r#"{"psi": [[1,0],[0,0]], "measurement": {"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,0],[1,0]]}}"#,
    )
    .unwrap();
    let out = qcd(&["protocol", &f("qcd_dephase.json"), "--strategy", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["p_accept_exact"], 0.5);
    assert_eq!(r["dnorm_witness_value"], Value::Null);
}

#[test]
fn close_images_instances_are_not_protocol_inputs() {
    let out = qcd(&["protocol", &f("ci_identity.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let commands: [&[&str]; 3] = [
        &["distance", "dnorm", &f("identity.qc"), &f("dephase.qc"), "--restarts", "6", "--seed", "9"],
        &["distance", "maxfid", &f("qcd_dephase.json"), "--restarts", "6", "--seed", "9"],
        &["protocol", &f("qcd_dephase.json"), "--restarts", "6", "--seed", "9", "--trials", "5000"],
    ];
    for args in commands {
        let base = qcd_with_threads(args, 1);
        for threads in [1, 2, 4] {
            assert_eq!(qcd_with_threads(args, threads).stdout, base.stdout, "{args:?} with {threads} threads");
        }
    }
}
