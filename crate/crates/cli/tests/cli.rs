use std::fs;
use std::process::{Command, Output};

fn ftomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftomo")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn tomogram_writes_csv_sidecar_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let o = ftomo(&[
        "tomogram", "--kind", "optical", "--state", "coherent", "--alpha", "0.8,-0.3",
        "--deformation", "qosc:0.2", "--theta-count", "16", "--x", "-7:7:0.05", "--audit",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,x,value"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 16 * 281);
    assert!(text.lines().last().unwrap().starts_with("# audit kind=optical"));
    assert!(text.trim_end().ends_with("pass=true"));
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("w.csv.json")).unwrap()).unwrap();
    assert_eq!(side["kind"], "optical");
    assert_eq!(side["audit"]["pass"], true);
    assert!(side["state_digest"].as_str().unwrap().starts_with("sha256:"));
    assert!(side["trunc_tail"].as_f64().unwrap() < 1e-12);
}

#[test]
fn tight_audit_fails_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = ftomo(&["tomogram", "--kind", "husimi", "--re", "-1:1:0.5", "--im", "-1:1:0.5", "--audit", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(fs::read_to_string(&out).unwrap().contains("pass=false"));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(code(&ftomo(&["tomogram", "--kind", "wigner"])), 2);
    assert_eq!(code(&ftomo(&["tomogram", "--deformation", "kerr:-1"])), 2);
    assert_eq!(code(&ftomo(&["entropy", "--s", "1"])), 2);
    assert_eq!(code(&ftomo(&["figure", "9"])), 2);
    assert_eq!(code(&ftomo(&["verify", "--only", "nonexistent"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"epsilon": 1e-12}"#).unwrap();
    assert_eq!(code(&ftomo(&["--config", cfg.to_str().unwrap(), "verify"])), 2);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, format!(r#"{{"id": "1", "x": "0.5:1:0.5", "out": {:?}}}"#, out.to_str().unwrap())).unwrap();
    let o = ftomo(&["--config", cfg.to_str().unwrap(), "figure"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("n,x,information"));
    assert_eq!(text.lines().count(), 1 + 3 * 2);
}

#[test]
fn verify_report_and_printed_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = ftomo(&["verify", "--only", "moment-erratum", "--only", "husimi-identity", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["all_pass"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 2);

    let o = ftomo(&["verify", "--only", "moment-erratum", "--force-paper-moment-constant"]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let residual = r["checks"][0]["residual"].as_f64().unwrap();
    assert!((residual - 0.25).abs() < 1e-9);
}

#[test]
fn entanglement_and_uncertainty_tables() {
    let dir = tempfile::tempdir().unwrap();
    let ent = dir.path().join("e.csv");
    let o = ftomo(&["entanglement", "--cat", "even", "--alpha1", "1", "--lambda", "0:1:0.5", "--out", ent.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&ent).unwrap();
    assert_eq!(text.lines().next(), Some("lambda,abs_alpha,sign,entropy"));
    assert_eq!(text.lines().count(), 4);

    let unc = dir.path().join("u.csv");
    let o = ftomo(&["uncertainty", "--state", "vacuum", "--lambda", "0.1:0.2:0.1", "--audit", "--out", unc.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&unc).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let exact: f64 = row[7].parse().unwrap();
    let small: f64 = row[8].parse().unwrap();
    assert!((small - 0.25 * (1.0 + 0.01 / 3.0)).abs() < 1e-12);
    assert!((exact - 0.25 * (0.1f64.sinh() / 0.1).powi(2)).abs() < 1e-12);
}
