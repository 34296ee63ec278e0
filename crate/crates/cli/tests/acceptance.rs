//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Criteria 1-10 run the library checks; 11 drives the built binary.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use ftomo::verify::{run_check, VerifyOptions};

const CRITERIA: [(u8, &str, f64); 10] = [
    (1, "tomogram-oracle", 5.0),
    (2, "normalization", 5.0),
    (3, "husimi-identity", 2.0),
    (4, "laguerre-inequality", 10.0),
    (5, "information-figure", 10.0),
    (6, "entanglement-oracle", 20.0),
    (7, "limit-values", 10.0),
    (8, "entropy-claims", 30.0),
    (9, "uncertainty", 10.0),
    (10, "moment-erratum", 5.0),
];

const FIGURE_BUDGET_S: f64 = 120.0;

fn report(id: u8, name: &str, pass: bool, runtime: f64, budget: f64, detail: &str) -> bool {
    let ok = pass && runtime < budget;
    println!(
        "criterion {id:>2} {name:<22} {} runtime {runtime:.3}s (budget {budget}s) {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn render_figures(dir: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_ftomo"))
        .args(["figure", "all", "--out"])
        .arg(dir)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("ftomo figure all exited with {status}"))
    }
}

fn determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    render_figures(&a)?;
    render_figures(&b)?;
    let mut bytes = 0;
    for n in 1..=5 {
        let name = format!("fig{n}.csv");
        let x = fs::read(a.join(&name)).map_err(|e| e.to_string())?;
        let y = fs::read(b.join(&name)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{name} differs between runs"));
        }
        bytes += x.len();
    }
    Ok(format!("fig1..fig5 identical ({bytes} bytes)"))
}

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let mut all = true;
    for (id, name, budget) in CRITERIA {
        all &= match run_check(name, &opts) {
            Ok(r) => report(id, name, r.pass, r.runtime_s, budget, &format!("residual {:e}", r.residual)),
            Err(e) => report(id, name, false, 0.0, budget, &e.to_string()),
        };
    }
    let start = Instant::now();
    let outcome = determinism();
    let elapsed = start.elapsed().as_secs_f64();
    all &= match outcome {
        Ok(detail) => report(11, "figure-determinism", true, elapsed, FIGURE_BUDGET_S, &detail),
        Err(detail) => report(11, "figure-determinism", false, elapsed, FIGURE_BUDGET_S, &detail),
    };
    println!("acceptance: {}", if all { "all criteria pass" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
