//! Acceptance battery: one test per criterion, each printing a pass/fail
//! line (visible with `--nocapture`) and asserting the outcome.
//!
//! Run with: `cargo test -p qlrc --test acceptance -- --nocapture`

use qlrc::battery::{self, CriterionResult};

fn assert_criterion(result: CriterionResult) {
    println!("{}", battery::render_line(&result));
    assert!(
        result.pass,
        "criterion {} ({}) failed: {}",
        result.index, result.name, result.detail
    );
}

#[test]
fn criterion_01_hamming_exactness() {
    assert_criterion(battery::hamming_exactness(&battery::bundled_matrix()));
}

#[test]
fn criterion_02_quantum_hamming() {
    assert_criterion(battery::quantum_hamming(&battery::bundled_matrix()));
}

#[test]
fn criterion_03_ordering_probability() {
    assert_criterion(battery::ordering_probability(&battery::bundled_matrix()));
}

#[test]
fn criterion_04_bound_values() {
    assert_criterion(battery::bound_values());
}

#[test]
fn criterion_05_dominance_inequalities() {
    assert_criterion(battery::dominance_inequalities());
}

#[test]
fn criterion_06_product_construction() {
    assert_criterion(battery::product_construction(&battery::bundled_matrix()));
}

#[test]
fn criterion_07_union_selection_lemmas() {
    assert_criterion(battery::union_selection_lemmas());
}

#[test]
fn criterion_08_constructive_sets() {
    assert_criterion(battery::constructive_sets(&battery::bundled_matrix()));
}

#[test]
fn criterion_09_erasure_recovery() {
    assert_criterion(battery::erasure_recovery(&battery::bundled_matrix()));
}

#[test]
fn criterion_10_figure_goldens() {
    assert_criterion(battery::figure_goldens());
}
