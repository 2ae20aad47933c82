//! End-to-end checks of the binary: output formats, config handling,
//! determinism, and the exit code contract (0 ok, 1 gate failure,
//! 2 domain, 3 usage).

use std::process::Command;

const EXP: &str = "iter(m=1,n=0,a=1,c=1)";
const QUAD_GAP: &str = "iter(m=1,n=0,a=2,c=3)";
const CUBIC: &str = "iter(m=1,n=0,a=3,c=1)";

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_relgrowth"))
        .args(args)
        .output()
        .expect("binary should spawn");
    (
        out.status.code().expect("binary should exit, not die on a signal"),
        String::from_utf8(out.stdout).expect("stdout should be utf-8"),
        String::from_utf8(out.stderr).expect("stderr should be utf-8"),
    )
}

fn json(stdout: &str) -> serde_json::Value {
    serde_json::from_str(stdout).expect("stdout should be a json record")
}

fn field(line: &str, idx: usize) -> &str {
    line.split(',').nth(idx).unwrap_or_else(|| panic!("no field {idx} in {line:?}"))
}

#[test]
fn indicators_json_recovers_the_quadratic_gap() {
    let (code, out, err) = run(&[
        "indicators", "--alpha", EXP, "--beta", QUAD_GAP, "--p", "1", "--q", "1",
        "--format", "json",
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    let v = json(&out);
    assert_eq!(v["alpha"], EXP);
    assert_eq!(v["p"], 1);
    assert!((v["rho"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert!((v["lambda"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert!((v["sigma"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-2);
    assert!((v["tau_bar"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-2);
}

#[test]
fn indicators_accepts_derived_max_modulus_scales() {
    let (code, out, err) = run(&[
        "indicators", "--alpha", EXP, "--beta", "maxmod(exppow(c=1,n=2))",
        "--p", "1", "--q", "1", "--format", "json",
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    let v = json(&out);
    assert!((v["rho"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert!((v["sigma"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-2);
}

#[test]
fn malformed_scale_literal_is_rejected_as_usage() {
    let (code, out, err) = run(&[
        "indicators", "--alpha", EXP, "--beta", "iter(m=1,n=0", "--p", "1", "--q", "1",
    ]);
    assert_eq!(code, 3);
    assert!(out.is_empty(), "no record on a usage error, got {out:?}");
    assert!(err.starts_with("error:"), "diagnostic goes to stderr, got {err:?}");
}

#[test]
fn missing_required_flag_is_rejected_as_usage() {
    let (code, out, err) = run(&["indicators", "--beta", "sinlog", "--p", "1", "--q", "1"]);
    assert_eq!(code, 3);
    assert!(out.is_empty());
    assert!(err.contains("--alpha"), "should name the missing flag, got {err:?}");
}

#[test]
fn classify_splits_verdicts_across_the_flip() {
    let base = [
        "integral", "classify", "--alpha", EXP, "--beta", CUBIC,
        "--p", "2", "--q", "2", "--A", "1", "--format", "csv",
    ];
    let (code, out, _) = run(&[&base[..], &["--k", "3.5"]].concat());
    assert_eq!(code, 0);
    let row = out.lines().nth(1).expect("one data row");
    assert_eq!(field(row, 1), "converges");

    let (code, out, _) = run(&[&base[..], &["--k", "3.0"]].concat());
    assert_eq!(code, 0, "an indeterminate verdict is an answer, not an error");
    let row = out.lines().nth(1).expect("one data row");
    assert_eq!(field(row, 1), "indeterminate");
    assert_eq!(field(row, 3), "", "no tail bound without convergence");
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let base = [
        "integral", "classify", "--alpha", EXP, "--beta", CUBIC,
        "--p", "2", "--q", "2", "--A", "1", "--k", "3.5",
    ];
    let (_, csv, _) = run(&[&base[..], &["--format", "csv"]].concat());
    let (_, js, _) = run(&[&base[..], &["--format", "json"]].concat());
    let slope_csv: f64 = field(csv.lines().nth(1).unwrap(), 2).parse().unwrap();
    let slope_json = json(&js)["verdict"]["decay_slope"].as_f64().unwrap();
    assert_eq!(slope_csv.to_bits(), slope_json.to_bits());
}

#[test]
fn transition_brackets_the_cubic_flip() {
    let (code, out, err) = run(&[
        "integral", "transition", "--alpha", EXP, "--beta", CUBIC,
        "--p", "2", "--q", "2", "--A", "1", "--krange", "1:6", "--tol", "0.05",
        "--format", "csv",
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    let mut k_lo = f64::NAN;
    let mut k_hi = f64::NAN;
    for line in out.lines().skip(1) {
        match field(line, 0) {
            "k_lo" => k_lo = field(line, 1).parse().unwrap(),
            "k_hi" => k_hi = field(line, 1).parse().unwrap(),
            _ => {}
        }
    }
    assert!(k_lo <= 3.0 && 3.0 <= k_hi, "bracket [{k_lo}, {k_hi}] should contain 3");
    assert!(k_hi - k_lo <= 0.1, "bracket [{k_lo}, {k_hi}] too wide");
    assert!(out.lines().any(|l| l.starts_with("probe,")), "probe rows feed the k/verdict plot");
}

#[test]
fn nevanlinna_counting_matches_the_pole_moduli() {
    let (code, out, err) = run(&[
        "nevanlinna", "--model", "rat(zeros=[];poles=[1,3];scale=1)", "--r", "6",
        "--format", "csv",
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    let row = out.lines().nth(1).expect("one radius row");
    let counting: f64 = field(row, 2).parse().unwrap();
    let expected = 6f64.ln() + 2f64.ln();
    assert!((counting - expected).abs() < 1e-12, "N(6) = {counting}, want {expected}");
    let proximity: f64 = field(row, 1).parse().unwrap();
    assert_eq!(proximity, 0.0, "a ratio of monic linear factors stays small on |z| = 6");
}

#[test]
fn catalog_lists_the_standard_pairs() {
    let (code, out, _) = run(&["catalog", "--format", "csv"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = out.lines().skip(1).map(|l| field(l, 0)).collect();
    assert_eq!(
        names,
        [
            "identity", "quadratic-gap", "cubic-power", "exp-gap", "sinlog",
            "maxmod-square", "flat-order", "rational-pair",
        ],
    );

    let (code, table, _) = run(&["catalog"]);
    assert_eq!(code, 0);
    assert!(table.contains("standard pairs (8)"));
    assert!(table.contains("scale   := sinlog"), "grammar reference belongs in the table view");
}

#[test]
fn verify_subset_is_deterministic_and_passes() {
    let args = ["verify", "--pairs", "identity,quadratic-gap", "--format", "json"];
    let (code_a, out_a, _) = run(&args);
    let (code_b, out_b, _) = run(&args);
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(out_a, out_b, "records must be byte-identical across runs");
    let v = json(&out_a);
    assert_eq!(v["report"]["summary"]["passed"], 2);
    assert_eq!(v["pairs"], serde_json::json!(["identity", "quadratic-gap"]));
}

#[test]
fn verification_outside_tolerance_exits_one() {
    let (code, out, _) = run(&[
        "verify", "--pairs", "sinlog", "--tol", "1e-6", "--format", "json",
    ]);
    assert_eq!(code, 1, "a failed gate is exit 1, not a crash");
    let v = json(&out);
    assert_eq!(v["report"]["summary"]["failed"], 1);
    assert_eq!(v["tol_override"], 1e-6, "the report still lands on stdout for inspection");
}

#[test]
fn degenerate_grid_is_a_domain_error() {
    let (code, out, err) = run(&[
        "indicators", "--alpha", EXP, "--beta", QUAD_GAP, "--p", "1", "--q", "1",
        "--grid", "2.0:0.5:8",
    ]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("degenerate grid"), "got {err:?}");
}

#[test]
fn unknown_pair_name_is_rejected_as_usage() {
    let (code, _, err) = run(&["verify", "--pairs", "nosuch"]);
    assert_eq!(code, 3);
    assert!(err.contains("nosuch"), "should name the bad pair, got {err:?}");
}

#[test]
fn stamp_stays_out_of_the_record_stream() {
    let (_, plain, err_plain) = run(&["catalog", "--format", "csv"]);
    let (_, stamped, err_stamped) = run(&["catalog", "--format", "csv", "--stamp"]);
    assert_eq!(plain, stamped, "--stamp must not perturb the record");
    assert!(err_plain.is_empty());
    assert!(err_stamped.contains("# stamp:"), "got {err_stamped:?}");
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!("# quadratic gap defaults\nalpha = {EXP}\nbeta = {QUAD_GAP}\np = 1\nq = 1\nformat = json\n"),
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let (code, out, err) = run(&["indicators", "--config", cfg]);
    assert_eq!(code, 0, "stderr: {err}");
    let v = json(&out);
    assert_eq!(v["beta"], QUAD_GAP);

    let (code, out, _) = run(&["indicators", "--config", cfg, "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(
        out.starts_with("indicator,field,index,t,value"),
        "the flag wins over the file, got {:?}",
        out.lines().next(),
    );
}

#[test]
fn unknown_config_key_is_rejected_as_usage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let (code, out, err) = run(&["catalog", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.is_empty());
    assert!(err.contains("bogus"), "should name the bad key, got {err:?}");
}

#[test]
fn out_flag_writes_the_record_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verdict.csv");
    let base = [
        "integral", "classify", "--alpha", EXP, "--beta", CUBIC,
        "--p", "2", "--q", "2", "--A", "1", "--k", "3.5", "--format", "csv",
    ];
    let (code, out, _) = run(&[&base[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(code, 0);
    assert!(out.is_empty(), "the record goes to the file, not stdout");
    let written = std::fs::read_to_string(&path).unwrap();
    let (_, direct, _) = run(&base);
    assert_eq!(written, direct);
}
