//! The acceptance suite as one test per criterion.
//!
//! The suite runs once per process; every test prints its criterion's
//! pass/fail line (visible with --nocapture or on failure) and asserts it.

use std::sync::OnceLock;

use altproj::harness::{run_suite, CriterionResult, SuiteOptions};

fn results() -> &'static [CriterionResult] {
    static RESULTS: OnceLock<Vec<CriterionResult>> = OnceLock::new();
    RESULTS.get_or_init(|| run_suite(&SuiteOptions::default()))
}

fn check(index: usize) {
    let result = results().iter().find(|r| r.index == index).expect("every criterion reports");
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_1_normalization() {
    check(1);
}

#[test]
fn criterion_2_decomposition_oracle() {
    check(2);
}

#[test]
fn criterion_3_convergence_budget() {
    check(3);
}

#[test]
fn criterion_4_fejer_monotonicity() {
    check(4);
}

#[test]
fn criterion_5_checker_facts() {
    check(5);
}

#[test]
fn criterion_6_rotation_finder() {
    check(6);
}

#[test]
fn criterion_7_projection_properties() {
    check(7);
}

#[test]
fn criterion_8_partition_facts() {
    check(8);
}
