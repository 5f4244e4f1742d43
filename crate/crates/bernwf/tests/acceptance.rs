//! End-to-end acceptance run: one test per criterion, each printing a
//! single PASS/FAIL line (visible with `--nocapture`) and enforcing
//! the runtime budgets that have one.

use bernwf::acceptance::{self, CriterionResult};
use bernwf::DEFAULT_SEED;

fn check(result: CriterionResult, max_seconds: Option<f64>) {
    let status = if result.passed { "PASS" } else { "FAIL" };
    println!(
        "criterion {:2} [{status}] {} ({:.2}s): {}",
        result.id, result.name, result.seconds, result.details
    );
    assert!(
        result.passed,
        "criterion {} ({}) failed: {}",
        result.id, result.name, result.details
    );
    if let Some(limit) = max_seconds {
        assert!(
            result.seconds < limit,
            "criterion {} took {:.1}s, budget {limit}s",
            result.id,
            result.seconds
        );
    }
}

#[test]
fn acceptance_01_moment_expansion_identity() {
    check(acceptance::criterion_1(), Some(5.0));
}

#[test]
fn acceptance_02_iterate_closed_form() {
    check(acceptance::criterion_2(), None);
}

#[test]
fn acceptance_03_absorption_bound_dominance() {
    check(acceptance::criterion_3(), Some(30.0));
}

#[test]
fn acceptance_04_voronovskaya_and_saturation() {
    check(acceptance::criterion_4(), None);
}

#[test]
fn acceptance_05_joint_limit() {
    check(acceptance::criterion_5(), Some(60.0));
}

#[test]
fn acceptance_06_chain_absorption_frequency() {
    check(acceptance::criterion_6(DEFAULT_SEED), Some(20.0));
}

#[test]
fn acceptance_07_diffusion_simulator_moments() {
    check(acceptance::criterion_7(DEFAULT_SEED), Some(120.0));
}

#[test]
fn acceptance_08_empirical_tail_bound() {
    check(acceptance::criterion_8(), None);
}

#[test]
fn acceptance_09_step_moment_scaling() {
    check(acceptance::criterion_9(), None);
}

#[test]
fn acceptance_10_convexity_preservation() {
    check(acceptance::criterion_10(DEFAULT_SEED), None);
}

#[test]
fn acceptance_11_poissonized_step_count() {
    check(acceptance::criterion_11(DEFAULT_SEED), None);
}
