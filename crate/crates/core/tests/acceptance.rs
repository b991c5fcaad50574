//! Full-scale acceptance suite. Each test writes one PASS/FAIL line straight
//! to stderr, so the lines show up even when test output is captured.

use std::io::Write;

use gwishart::validate::{run_criterion, Scale};

fn check(id: usize) {
    let result = run_criterion(id, Scale::Full);
    let _ = writeln!(std::io::stderr(), "{result}");
    assert!(result.passed, "{result}");
}

#[test]
fn criterion_1_direct_sampler_reference_mean() {
    check(1);
}

#[test]
fn criterion_2_block_gibbs_agreement() {
    check(2);
}

#[test]
fn criterion_3_complete_graph_identity() {
    check(3);
}

#[test]
fn criterion_4_completion_residuals() {
    check(4);
}

#[test]
fn criterion_5_clique_conditional_law() {
    check(5);
}

#[test]
fn criterion_6_iris_structure() {
    check(6);
}

#[test]
fn criterion_7_exact_oracle_agreement() {
    check(7);
}

#[test]
fn criterion_8_null_data_uniformity() {
    check(8);
}

#[test]
fn criterion_9_mode_stationarity() {
    check(9);
}
