//! Black-box tests of the binary: exit codes, JSON shape, CSV determinism.
//! Everything here drives the compiled executable the way a shell user
//! would; nothing reaches into library internals except to recompute the
//! closed forms the output is compared against.

use std::io::Write;
use std::process::{Command, Output};

use prophet_lab::dist::Distribution;
use prophet_lab::policy::closed_form_single;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prophet-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn prophet-lab")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn refuses_to_run_without_a_subcommand() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_text(&out).contains("Usage"));
}

#[test]
fn solves_the_two_threshold_headline_model() {
    let out = run(&["frlp", "two", "--c1", "0.7067", "--c2", "1.8353", "--rho", "0.6204"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["config"]["params"]["family"], "two_threshold");
    assert_eq!(doc["result"]["status"], "optimal");
    let value = doc["result"]["value"].as_f64().unwrap();
    assert!((0.6786..0.679).contains(&value), "value {value}");
}

#[test]
fn simulation_tracks_the_closed_form() {
    let out = run(&[
        "simulate", "--policy", "single", "--c", "1.0", "--dist", "uniform01", "--n", "100",
        "--trials", "1000000", "--seed", "7",
    ]);
    let doc = stdout_json(&out);
    let mean = doc["result"]["alg_mean"].as_f64().unwrap();
    let stderr = doc["result"]["alg_stderr"].as_f64().unwrap();
    let dist = Distribution::uniform(0.0, 1.0).unwrap();
    let exact = closed_form_single(&dist, 100, 1.0).unwrap();
    assert!(
        (mean - exact).abs() <= 5.0 * stderr,
        "mean {mean} vs closed form {exact} (stderr {stderr})"
    );
}

#[test]
fn rejects_malformed_policy_json() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{{ not json").unwrap();
    let path = file.path().to_str().unwrap();
    let out = run(&[
        "simulate", "--policy-file", path, "--dist", "uniform01", "--n", "10", "--trials", "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_text(&out);
    assert!(err.contains("line") && err.contains("column"), "stderr: {err}");
}

#[test]
fn rejects_unknown_policy_fields() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"variant": "single_threshold", "c": 1.0, "elephant": 3}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let out = run(&[
        "simulate", "--policy-file", path, "--dist", "uniform01", "--n", "10", "--trials", "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_text(&out).contains("unknown field"), "stderr: {}", stderr_text(&out));
}

#[test]
fn reports_domain_errors_with_exit_one() {
    let out = run(&["frlp", "two", "--c1", "2.0", "--c2", "1.0", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("domain"), "stderr: {}", stderr_text(&out));
}

#[test]
fn sweep_csv_is_deterministic_and_well_formed() {
    let args =
        ["sweep", "--c-list", "0.5,0.7", "--k", "10", "--rho-grid", "11", "--zeta", "2"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "reruns must be byte-identical");
    let text = String::from_utf8(first.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: "));
    assert_eq!(lines.next().unwrap(), "c,best_rho,ratio,k,beta_ratio");
    assert_eq!(lines.count(), 2, "one row per rate");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let args =
        ["sweep", "--c-list", "0.6", "--k", "10", "--rho-grid", "11", "--zeta", "2"];
    let one = bin().args(args).args(["--threads", "1"]).output().unwrap();
    let two = bin().args(args).args(["--threads", "2"]).output().unwrap();
    let via_env =
        bin().args(args).env("PROPHET_LAB_THREADS", "3").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(one.stdout, via_env.stdout);
}

#[test]
fn bound_probe_matches_the_pinned_values() {
    // Both reference values were fixed by high-precision evaluation of the
    // bound formulas outside this codebase.
    let out = run(&["bounds", "two", "--at", "0.51904,2.32059,0.60473"]);
    let v = stdout_json(&out)["result"]["value"].as_f64().unwrap();
    assert!((v - 0.7080400572537283).abs() < 1e-9, "two-threshold probe {v}");

    let out = run(&["bounds", "oa", "--at", "0.37476,0.44799"]);
    let v = stdout_json(&out)["result"]["value"].as_f64().unwrap();
    assert!((v - 0.690919258501069).abs() < 1e-9, "observe-accept probe {v}");
}

#[test]
fn dump_prints_the_model_instead_of_solving() {
    let out = run(&["frlp", "k", "--c-list", "0.7", "--rho-list", "1.0", "--zeta", "2", "--dump"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("vars:"), "dump starts with the variable list");
    assert!(text.contains("\nmin ") && text.contains(">="), "dump: {text}");
}

#[test]
fn tune_never_loses_to_its_seed() {
    let seed = run(&["frlp", "two", "--c1", "0.7", "--c2", "1.8", "--rho", "0.62", "--zeta", "10"]);
    let seed_value = stdout_json(&seed)["result"]["value"].as_f64().unwrap();
    let tuned = run(&[
        "tune", "two", "--c1", "0.7", "--c2", "1.8", "--rho", "0.62", "--zeta", "10", "--step",
        "0.05", "--halvings", "1",
    ]);
    let tuned_value = stdout_json(&tuned)["result"]["value"].as_f64().unwrap();
    assert!(
        tuned_value >= seed_value - 1e-12,
        "tuned {tuned_value} vs seed {seed_value}"
    );
}

#[test]
fn sweep_ranges_include_both_endpoints() {
    let out = run(&[
        "sweep", "--c-from", "0.5", "--c-to", "0.7", "--c-step", "0.1", "--k", "5", "--rho-grid",
        "6", "--zeta", "2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rates: Vec<&str> =
        text.lines().skip(2).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rates, ["0.500000", "0.600000", "0.700000"]);
}

#[test]
fn unknown_check_suite_is_a_usage_error() {
    let out = run(&["check", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}
