//! Gate suite, binary side: the standard verification run must reproduce
//! the checked-in report byte for byte and exit 0, and every exit code in
//! the contract must be reachable. Prints one pass/fail line (visible
//! under `cargo test -- --show-output`).

use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, Vec<u8>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_relgrowth"))
        .args(args)
        .output()
        .expect("binary should spawn");
    (
        out.status.code().expect("binary should exit, not die on a signal"),
        out.stdout,
        String::from_utf8(out.stderr).expect("stderr should be utf-8"),
    )
}

#[test]
fn criterion_11_standard_run_reproduces_the_golden_report() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let cfg = manifest.join("../../standard.cfg");
    let cfg = cfg.to_str().unwrap();
    let golden_dir = manifest.join("tests/golden");
    let mut checks: Vec<(String, bool)> = Vec::new();

    let (code, stdout, stderr) = run(&["verify", "--config", cfg]);
    checks.push((format!("standard run exits 0, got {code}, stderr {stderr:?}"), code == 0));
    let golden = std::fs::read(golden_dir.join("standard_report.json")).unwrap();
    checks.push((
        "json report matches the golden byte for byte".into(),
        stdout == golden,
    ));

    // the flag overrides the config's format = json
    let (code, stdout, _) = run(&["verify", "--config", cfg, "--format", "csv"]);
    checks.push((format!("csv run exits 0, got {code}"), code == 0));
    let golden = std::fs::read(golden_dir.join("standard_report.csv")).unwrap();
    checks.push((
        "csv report matches the golden byte for byte".into(),
        stdout == golden,
    ));

    // exit 1: a gate failure is reported, not crashed on
    let (code, stdout, _) = run(&["verify", "--pairs", "sinlog", "--tol", "1e-6"]);
    checks.push((format!("failed gate exits 1, got {code}"), code == 1));
    checks.push(("failed gate still writes its report".into(), !stdout.is_empty()));

    // exit 2: domain errors
    let (code, _, stderr) = run(&[
        "indicators", "--alpha", "iter(m=1,n=0,a=1,c=1)", "--beta", "sinlog",
        "--p", "1", "--q", "1", "--grid", "2.0:0.5:8",
    ]);
    checks.push((format!("domain error exits 2, got {code}, stderr {stderr:?}"), code == 2));

    // exit 3: usage errors
    let (code, _, stderr) = run(&[
        "indicators", "--alpha", "iter(m=1,n=0", "--beta", "sinlog", "--p", "1", "--q", "1",
    ]);
    checks.push((format!("usage error exits 3, got {code}, stderr {stderr:?}"), code == 3));

    let pass = checks.iter().all(|c| c.1);
    println!(
        "criterion 11 [{}] standard verification run and exit code contract",
        if pass { "PASS" } else { "FAIL" }
    );
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    assert!(failed.is_empty(), "criterion 11 failed: {failed:#?}");
}
