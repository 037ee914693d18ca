use std::path::{Path, PathBuf};
use std::process::Command;

use bound_ent::linalg::ComplexMatrix;
use bound_ent::states::{max_entangled, DensityMatrix, PartyDims, PureState};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bound-ent")).args(args).env_remove("BOUND_ENT_TOL").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, out) = run(&all);
    (code, serde_json::from_str(&out).unwrap())
}

fn write(dir: &Path, name: &str, value: &impl serde::Serialize) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(value).unwrap()).unwrap();
    p
}

fn two_qubits() -> PartyDims {
    PartyDims::new(vec![2, 2]).unwrap()
}

#[test]
fn lemma3_values() {
    for (m, d, want) in [("2", "3", 0.5), ("5", "5", 1.0), ("2", "11", 0.1)] {
        let (code, v) = run_json(&["lemma3", "--m", m, "--d", d]);
        assert_eq!(code, 0);
        assert!((v["data"]["alpha"].as_f64().unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn lemma3_usage_error() {
    assert_eq!(run(&["lemma3", "--m", "1", "--d", "3"]).0, 2);
    assert_eq!(run(&["lemma3", "--m", "2"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
}

#[test]
fn e1_reports() {
    let (code, v) = run_json(&["e1", "--m", "2", "--d", "3"]);
    assert_eq!(code, 0);
    assert!((v["data"]["success_probability"].as_f64().unwrap() - 1.0 / 28.0).abs() < 1e-12);
    let (code, v) = run_json(&["e1", "--m", "2", "--d", "4"]);
    assert_eq!(code, 0);
    assert!((v["data"]["success_probability"].as_f64().unwrap() - 1.0 / 40.0).abs() < 1e-12);
    let (code, v) = run_json(&["e1", "--m", "3", "--d", "3", "--check-ppt"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["regime"], "d <= m");
    assert!(v["data"].get("success_probability").is_none());
}

#[test]
fn ghz_w_both_directions() {
    for dir in ["w2ghz", "ghz2w"] {
        let (code, v) = run_json(&["ghz-w", "--dir", dir, "--mode", "safe"]);
        assert_eq!(code, 0);
        let run = &v["data"][0];
        assert!((run["x0"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!(run["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
        assert_eq!(run["cut_bounds"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn text_mode() {
    let (code, out) = run(&["ghz-w"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("ghz-w: PASS"));
}

#[test]
fn convert_files() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(dir.path(), "src.json", &PureState::schmidt_form(&[0.7, 0.3], 2, 2).unwrap());
    let dst = write(dir.path(), "dst.json", &PureState::schmidt_form(&[0.5, 0.3, 0.2], 3, 3).unwrap());
    let (code, v) = run_json(&["convert", "--src", src.to_str().unwrap(), "--dst", dst.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["stages"].as_array().unwrap().len(), 3);

    let (code, v) = run_json(&["convert", "--src", src.to_str().unwrap(), "--dst", src.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["total_probability"].as_f64().unwrap(), 1.0);

    let prod = write(dir.path(), "prod.json", &PureState::basis(&[2, 2], &[0, 0]).unwrap());
    let (code, v) = run_json(&["convert", "--src", prod.to_str().unwrap(), "--dst", dst.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(v["error"].as_str().unwrap().contains("product state"));
}

#[test]
fn theorem3_files() {
    let dir = tempfile::tempdir().unwrap();
    let mixed = DensityMatrix::new(ComplexMatrix::identity(4).scale(0.25), two_qubits()).unwrap();
    let path = write(dir.path(), "mixed.json", &mixed);
    let (code, v) = run_json(&["theorem3", "--state", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["certificate"]["conclusion"], "ImpossibleByStructure");

    let pure = DensityMatrix::from_pure(&max_entangled(2));
    let path = write(dir.path(), "pure.json", &pure);
    let (code, v) = run_json(&["theorem3", "--state", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(v["error"].as_str().unwrap().contains("rank hypothesis"));

    // Werner state at visibility 0.9
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = [0.0, s, -s, 0.0].map(|x| bound_ent::linalg::C64::new(x, 0.0));
    let werner = &ComplexMatrix::projector(&singlet).scale(0.9) + &ComplexMatrix::identity(4).scale(0.1 / 4.0);
    let path = write(dir.path(), "werner.json", &DensityMatrix::new(werner, two_qubits()).unwrap());
    let (code, v) = run_json(&["theorem3", "--state", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["certificate"]["kernel_dim"], 0);
}

#[test]
fn twirl_test_runs() {
    let (code, v) = run_json(&["--seed", "3", "twirl-test", "--d", "2,3", "--samples", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"].as_array().unwrap().len(), 2);
}

#[test]
fn tolerance_from_environment() {
    // an absurdly strict tolerance makes the claim checks fail
    let out = Command::new(env!("CARGO_BIN_EXE_bound-ent"))
        .args(["e1", "--m", "2", "--d", "3"])
        .env("BOUND_ENT_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn deterministic_given_seed() {
    let a = run(&["--json", "--seed", "7", "twirl-test", "--samples", "5"]).1;
    let b = run(&["--json", "--seed", "7", "twirl-test", "--samples", "5"]).1;
    assert_eq!(a, b);
}
