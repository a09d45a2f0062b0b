//! Acceptance suite: one test per verification criterion, each delegating
//! to the corresponding suite function. Every check is an exact integer or
//! polynomial equality; there are no tolerances anywhere.

use straightening::suites;

fn report(outcome: &suites::SuiteOutcome) {
    let status = if outcome.passed() { "PASS" } else { "FAIL" };
    println!("[{status}] {} ({} checks)", outcome.name, outcome.checks);
    for f in &outcome.failures {
        println!("    failure: {f}");
    }
    assert!(
        outcome.passed(),
        "{}: {} failures",
        outcome.name,
        outcome.failures.len()
    );
}

#[test]
fn criterion_1_finite_field_formulas() {
    report(&suites::suite_finite_field(false));
}

#[test]
fn criterion_2_confluence_and_strategy_independence() {
    report(&suites::suite_confluence(500, 42));
}

#[test]
fn criterion_3_relation_preservation() {
    report(&suites::suite_rel_preservation());
}

#[test]
fn criterion_4_hecke_action_equivalence() {
    report(&suites::suite_hecke_equivalence());
}

#[test]
fn criterion_5_padic_oracle() {
    report(&suites::suite_padic_oracle(false));
}

#[test]
fn criterion_6_freeness_and_rank() {
    report(&suites::suite_freeness(false));
}

#[test]
fn criterion_7_transform_identities() {
    report(&suites::suite_transforms());
}

#[test]
fn criterion_8_derived_relations() {
    report(&suites::suite_derived_relations());
}
