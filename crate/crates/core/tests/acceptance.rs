//! Acceptance suite: every verification criterion as its own test, printing
//! one pass/fail line per criterion.

use glpin_core::acceptance::{run_criterion, SuiteContext};

fn run(id: usize) {
    let report = run_criterion(id, SuiteContext::global());
    println!("{}", report.line());
    assert!(report.pass, "{}", report.line());
}

#[test]
fn criterion_01_fhat_saturation() {
    run(1);
}

#[test]
fn criterion_02_fhat_table() {
    run(2);
}

#[test]
fn criterion_03_scaling_identity() {
    run(3);
}

#[test]
fn criterion_04_small_b_law() {
    run(4);
}

#[test]
fn criterion_05_energy_proxy() {
    run(5);
}

#[test]
fn criterion_06_test_configuration() {
    run(6);
}

#[test]
fn criterion_07_diagnostics() {
    run(7);
}

#[test]
fn criterion_08_de_gennes() {
    run(8);
}

#[test]
fn criterion_09_montgomery_halfplane() {
    run(9);
}

#[test]
fn criterion_10_mu1_lambda1() {
    run(10);
}

#[test]
fn criterion_11_hc3_nonvanishing() {
    run(11);
}

#[test]
fn criterion_12_hc3_vanishing() {
    run(12);
}

#[test]
fn criterion_13_small_h_negativity() {
    run(13);
}

#[test]
fn criterion_14_giorgi_phillips() {
    run(14);
}

#[test]
fn criterion_15_homogenization() {
    run(15);
}

#[test]
fn criterion_16_psi4_identity() {
    run(16);
}
