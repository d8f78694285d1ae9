use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn ncdx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncdx")).args(args).output().expect("spawn ncdx")
}

fn run_fixture(mode: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![mode, "--input", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    ncdx(&args)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON diagnostic")
}

#[test]
fn golden_fixtures_exit_zero() {
    for (mode, name) in [
        ("rank1", "rank1_2x2.json"),
        ("rank1", "rank1_3x3_shift.json"),
        ("rank1", "rank1_3x3_given_l.json"),
        ("airy", "airy_2x2.json"),
        ("jordan", "jordan_2x2.json"),
        ("quasidet", "quasidet_blocks.json"),
    ] {
        let out = run_fixture(mode, name, &[]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let doc = stdout_json(&out);
        assert_eq!(doc["mode"], mode);
        assert_eq!(doc["report"]["all_pass"], true, "{name}");
    }
}

#[test]
fn rank1_result_fields() {
    let doc = stdout_json(&run_fixture("rank1", "rank1_2x2.json", &[]));
    assert_eq!(doc["g"], serde_json::json!([["x^4", "0"], ["0", "x^4"]]));
    assert_eq!(doc["order"], 1);
    for key in ["P", "Q", "P_prime", "Q_prime", "bP_prime", "bQ_prime", "Phi", "Phi_prime", "dual"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["P"]["var"], "x");
    assert_eq!(doc["P"]["coeffs"].as_array().unwrap().len(), 2);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for (mode, name) in [("rank1", "rank1_3x3_shift.json"), ("airy", "airy_2x2.json")] {
        let a = run_fixture(mode, name, &[]);
        let b = run_fixture(mode, name, &[]);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn malformed_input_exits_two() {
    for (mode, name, kind) in [
        ("rank1", "bad_kn.json", "Schema"),
        ("rank1", "bad_json.json", "Parse"),
        ("rank1", "bad_variable.json", "UnknownVariable"),
    ] {
        let out = run_fixture(mode, name, &[]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(out.stdout.is_empty());
        let d = stderr_json(&out);
        assert_eq!(d["exit_code"], 2);
        assert_eq!(d["error"], kind, "{name}");
    }
}

#[test]
fn mode_mismatch_and_missing_file_exit_two() {
    let out = run_fixture("airy", "rank1_2x2.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    let missing = scratch("does_not_exist.json");
    let out = ncdx(&["rank1", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "Io");
}

#[test]
fn violated_preconditions_exit_three() {
    for (mode, name) in [
        ("rank1", "degenerate_kernel.json"),
        ("jordan", "irrational_spectrum.json"),
        ("rank1", "not_in_kernel.json"),
        ("airy", "airy_not_in_kernel.json"),
    ] {
        let out = run_fixture(mode, name, &[]);
        assert_eq!(out.status.code(), Some(3), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stderr_json(&out)["exit_code"], 3);
    }
}

#[test]
fn check_only_emits_report_alone() {
    let doc = stdout_json(&run_fixture("airy", "airy_2x2.json", &["--check-only"]));
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["mode", "report"]);
    assert_eq!(doc["report"]["all_pass"], true);
}

#[test]
fn output_and_latex_files() {
    let json_path = scratch("rank1_2x2.out.json");
    let tex_path = scratch("rank1_2x2.tex");
    let out = run_fixture(
        "rank1",
        "rank1_2x2.json",
        &["--output", json_path.to_str().unwrap(), "--latex", tex_path.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&json_path).unwrap();
    assert_eq!(written, run_fixture("rank1", "rank1_2x2.json", &[]).stdout);
    let tex = std::fs::read_to_string(&tex_path).unwrap();
    assert!(tex.contains("\\begin{document}"));
    assert!(tex.contains("\\partial_x"));
    assert!(tex.contains("\\end{document}"));
}

#[test]
fn alpha0_override() {
    let base = stdout_json(&run_fixture("airy", "airy_2x2.json", &[]));
    assert_eq!(base["alpha0"], "-1");
    // the golden basis lies in the kernel only for alpha0 = -1
    let out = run_fixture("airy", "airy_2x2.json", &["--alpha0", "-2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "KernelMismatch");
    let out = run_fixture("airy", "airy_identity_q.json", &["--alpha0", "2/3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["alpha0"], "2/3");
    assert_eq!(doc["P"]["coeffs"][0][0][0], "2/3*x");
    let out = run_fixture("airy", "airy_2x2.json", &["--alpha0", "one"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_round_trip() {
    for (mode, name) in [("rank1", "rank1_3x3_given_l.json"), ("airy", "airy_2x2.json")] {
        let path = scratch(&format!("{name}.result.json"));
        let out = run_fixture(mode, name, &["--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let out = ncdx(&["verify", "--input", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let doc = stdout_json(&out);
        assert_eq!(doc["report"]["all_pass"], true);
    }
}

#[test]
fn verify_rejects_tampered_result() {
    let path = scratch("tampered.json");
    let out = run_fixture("rank1", "rank1_2x2.json", &["--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut doc: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    doc["g"] = serde_json::json!([["x^3", "0"], ["0", "x^3"]]);
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = ncdx(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "VerificationFailed");
    assert_eq!(stdout_json(&out)["report"]["all_pass"], false);
}
