use std::fs;
use std::process::{Command, Output};

fn qst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qst")).args(args).env("QST_THREADS", "2").output().expect("run qst")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn gen_state_contract() {
    let out = qst(&["gen-state", "--n", "4", "--k", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    let (re, im) = (terms[0]["re"].as_f64().unwrap(), terms[0]["im"].as_f64().unwrap());
    assert!((re.hypot(im) - 1.0).abs() < 1e-12);

    let a = qst(&["gen-state", "--n", "6", "--k", "4", "--min-prob", "0.05", "--seed", "7"]);
    let b = qst(&["gen-state", "--n", "6", "--k", "4", "--min-prob", "0.05", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let probs: Vec<f64> = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["re"].as_f64().unwrap().powi(2) + t["im"].as_f64().unwrap().powi(2))
        .collect();
    assert_eq!(probs.len(), 4);
    assert!(probs.iter().all(|&p| p >= 0.05 - 1e-12));
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let bad = qst(&["gen-state", "--n", "3", "--k", "4", "--min-prob", "0.3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_unitary_exit_codes() {
    let ok = qst(&["verify-unitary", "--n", "3", "--trials", "10", "--seed", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert!(v["max_diff"].as_f64().unwrap() < 1e-10);
    assert!(v["golden_diff"].as_f64().unwrap() < 1e-15);
    assert_eq!(v["seed"].as_u64(), Some(1));
    assert!(v["version"].is_string());

    let fail = qst(&["verify-unitary", "--n", "1", "--trials", "1", "--tol", "0"]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn conjecture_scan_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    let p = path.to_str().unwrap();
    let out = qst(&["conjecture-scan", "--n", "3", "--trials", "5", "--seed", "4", "--out", p]);
    assert!(out.status.success());
    let first = fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 5);
    assert!(v["records"][0]["max_E_residual"].is_number());
    qst(&["conjecture-scan", "--n", "3", "--trials", "5", "--seed", "4", "--out", p]);
    assert_eq!(fs::read_to_string(&path).unwrap(), first);

    let empty = qst(&["conjecture-scan", "--n", "3", "--trials", "0"]);
    assert!(json(&empty)["records"].as_array().unwrap().is_empty());
}

#[test]
fn tomography_on_basis_state_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    fs::write(&path, r#"{"n": 3, "terms": [{"bits": "101", "re": 0.0, "im": 1.0}]}"#).unwrap();
    let out = qst(&["tomography", "--state", path.to_str().unwrap(), "--t", "4", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["config"]["seed"].as_u64(), Some(2));

    let missing = qst(&["tomography", "--state", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());

    let neither = qst(&["tomography"]);
    assert_eq!(neither.status.code(), Some(2));
}

#[test]
fn tomography_threshold_controls_exit() {
    let args = ["tomography", "--n", "3", "--k", "2", "--min-prob", "0.2", "--t", "4", "--shots-mag", "200", "--shots-phase", "200"];
    let strict = [&args[..], &["--fidelity-threshold", "1.1"]].concat();
    assert_eq!(qst(&strict).status.code(), Some(1));
    let lax = [&args[..], &["--fidelity-threshold", "0.0"]].concat();
    assert_eq!(qst(&lax).status.code(), Some(0));
}

#[test]
fn bench_csv_header() {
    let out = qst(&["bench", "--n-min", "2", "--n-max", "3", "--reps", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,op,mean_ns,stddev"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qst(&["verify-unitary"]).status.code(), Some(2));
    assert_eq!(qst(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qst(&["verify-unitary", "--n", "2", "--format", "csv"]).status.code(), Some(2));
}
