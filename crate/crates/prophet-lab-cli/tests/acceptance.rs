//! The project scoreboard, one test per check. Each test prints the same
//! line the `check` subcommand would (visible under `--nocapture`) and then
//! asserts it, so a plain `cargo test` turns any regression into a named
//! failure whose message carries the measured numbers.
//!
//! Two entries are known red and left red on purpose; their check's doc
//! comment carries the analysis. Checks 5 and 6 assert targets that the
//! formulas themselves cannot quite reach: the observe-and-accept bound
//! surface peaks at 0.691445, below the quoted [0.69195, 0.69210] window,
//! and the rate sweep sits on or past its crossing lines at c ∈ {0.1, 1.0,
//! 2.5}. The assertions state the targets as quoted rather than widening
//! them to fit.
//!
//! The tests share a lock: several are wall-clock-bounded reproductions and
//! must not contend for cores with each other.

use std::sync::Mutex;

use prophet_lab_cli::checks::{self, CheckOutcome};

static TURN: Mutex<()> = Mutex::new(());

fn run(check: fn() -> CheckOutcome) {
    let _turn = TURN.lock().unwrap_or_else(|e| e.into_inner());
    let outcome = check();
    println!("{}", outcome.line());
    assert!(outcome.pass, "{}", outcome.line());
}

#[test]
fn check_01_two_threshold_headline_level() {
    run(checks::check_1);
}

#[test]
fn check_02_k_threshold_ladder_floors() {
    run(checks::check_2);
}

#[test]
fn check_03_observe_accept_headline_level() {
    run(checks::check_3);
}

#[test]
fn check_04_two_threshold_bound_peak() {
    run(checks::check_4);
}

#[test]
fn check_05_observe_accept_bound_peak() {
    run(checks::check_5);
}

#[test]
fn check_06_rate_sweep_crossings() {
    run(checks::check_6);
}

#[test]
fn check_07_simulation_matches_closed_forms() {
    run(checks::check_7);
}

#[test]
fn check_08_induced_points_feasible_across_zoo() {
    run(checks::check_8);
}

#[test]
fn check_09_secretary_hit_rate() {
    run(checks::check_9);
}

#[test]
fn check_10_closed_form_matches_direct_integration() {
    run(checks::check_10);
}
