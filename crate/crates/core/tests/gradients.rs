//! Finite-difference verification of every analytic gradient: each layer
//! type and both composed networks, 20 random parameter draws apiece, max
//! relative error below 1e-4 at perturbation 1e-4.

use cws_core::verify::{gradient_check_suite, GRAD_CHECK_TOLERANCE};

#[test]
fn every_layer_and_network_passes_twenty_random_draws() {
    let reports = gradient_check_suite(20, false).unwrap();
    assert_eq!(reports.len(), 12);
    for r in &reports {
        assert!(
            r.max_rel_error < GRAD_CHECK_TOLERANCE,
            "{}: max relative error {} at tolerance {}",
            r.name,
            r.max_rel_error,
            GRAD_CHECK_TOLERANCE
        );
    }
}

#[test]
fn fault_injection_trips_the_checker() {
    let reports = gradient_check_suite(2, true).unwrap();
    let fault = reports.iter().find(|r| r.name == "injected_fault").unwrap();
    assert!(
        fault.max_rel_error > 0.3,
        "injected fault scored only {}",
        fault.max_rel_error
    );
}
