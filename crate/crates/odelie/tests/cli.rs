//! End-to-end tests of the `odelie` binary: exit codes, output schema, and
//! seed handling.

use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_odelie"));
    // Tests control seeding explicitly; the ambient environment must not.
    c.env_remove("ODELIE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verify_symmetry_passes_with_exit_zero() {
    let out = run(&["verify-symmetry", "--eq", "E1", "--q", "(-1)^n"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn verify_symmetry_fails_with_exit_one() {
    let out = run(&["verify-symmetry", "--eq", "E1", "--q", "n*u[0]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn catalog_labels_resolve() {
    let out = run(&["verify-symmetry", "--eq", "E2", "--q", "Q3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let out = run(&["verify-integral", "--eq", "E1", "--phi", "phi4"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_equation_is_a_usage_error() {
    let out = run(&["verify-symmetry", "--eq", "E9", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("E9"));
}

#[test]
fn malformed_formula_is_a_usage_error() {
    let out = run(&["verify-symmetry", "--eq", "E1", "--q", "u[0]+*2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_report_has_the_documented_fields() {
    let out = run(&["verify-symmetry", "--eq", "E1", "--q", "Q1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["verdict"], "PASS");
    assert!(v["claim"].is_string());
    assert!(v["maxResidual"].is_number());
    assert!(v["samples"].is_number());
    assert_eq!(v["seed"], "0x5EED");
    assert!(v["details"].is_object());
}

#[test]
fn env_seed_is_used_and_reported() {
    let out = bin()
        .args(["verify-symmetry", "--eq", "E1", "--q", "Q1", "--json"])
        .env("ODELIE_SEED", "0xBEEF")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["seed"], "0xBEEF");
}

#[test]
fn seed_flag_overrides_env_seed() {
    let out = bin()
        .args(["verify-symmetry", "--eq", "E1", "--q", "Q1", "--seed", "123", "--json"])
        .env("ODELIE_SEED", "0xBEEF")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["seed"], "0x7B");
}

#[test]
fn unreadable_seed_is_a_usage_error() {
    let out = run(&["verify-symmetry", "--eq", "E1", "--q", "Q1", "--seed", "zebra"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["verify-symmetry", "--eq", "E1", "--q", "Q1"])
        .env("ODELIE_SEED", "zebra")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_seed_means_identical_output() {
    let a = run(&["verify-symmetry", "--eq", "E2", "--q", "Q1", "--json"]);
    let b = run(&["verify-symmetry", "--eq", "E2", "--q", "Q1", "--json"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn multiplier_prints_the_closed_form() {
    let out = run(&["multiplier", "--eq", "E2", "--phi", "phi1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "(n+4)/3");
}

#[test]
fn orbit_iterates_the_map() {
    let out = run(&["orbit", "--eq", "E3", "--init", "0.5,0.5,0.5,0.5", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    // (0.5 + 0.5) / (0.25 + 1) = 0.8
    assert!(stdout(&out).contains("0.8"), "got: {}", stdout(&out));
}

#[test]
fn orbit_rejects_nonpositive_base_index_for_e2() {
    let out = run(&["orbit", "--eq", "E2", "--init", "1,2,3,4", "--steps", "2", "--n0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n0"));
}

#[test]
fn orbit_accepts_equation_files() {
    let path = std::env::temp_dir().join("odelie-cli-test-eq.json");
    std::fs::write(
        &path,
        r#"{"name":"double","order":2,"omega":"2*u[0]","domain":{"nMin":1,"nMax":40,"uIntervals":[[0.1,0.9]]}}"#,
    )
    .unwrap();
    let out = run(&["orbit", "--eq", path.to_str().unwrap(), "--init", "1,3", "--steps", "4"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "1, 3, 2, 6, 4, 12");
    std::fs::remove_file(&path).ok();
}

#[test]
fn catalog_run_is_green() {
    let out = run(&["catalog"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("0 failed"), "got: {text}");
    assert!(!text.contains("\nFAIL"), "got: {text}");
}

#[test]
fn find_symmetries_reports_dimension() {
    let out = run(&[
        "find-symmetries",
        "--eq",
        "E1",
        "--basis",
        "1,(-1)^n,cos(n*pi/2),sin(n*pi/2),u[0]",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("dimension 5"), "got: {}", stdout(&out));
}

#[test]
fn classify_defaults_to_catalog_integrals() {
    let out = run(&["classify", "--eq", "E1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("rank: 4"), "got: {text}");
    assert!(text.contains("class 4"), "got: {text}");
}

#[test]
fn deteq_accepts_the_logarithmic_characteristic() {
    let out = run(&[
        "deteq",
        "--eq",
        "E3",
        "--q",
        "1/2*(u[0]^2-1)*log(abs((1-u[0])/(1+u[0])))",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verify-symmetry"));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
}
