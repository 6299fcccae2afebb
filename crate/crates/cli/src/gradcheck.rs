//! Gradient verification command: run the finite-difference suite and print
//! one line per check.

use cws_core::verify::{gradient_check_suite, GradCheckReport, GRAD_CHECK_TOLERANCE};
use cws_core::Result;

pub struct GradCheckRun {
    pub reports: Vec<GradCheckReport>,
    pub passed: bool,
}

/// Execute the suite and render the per-check table to stdout.
pub fn run_gradcheck(draws: usize, inject_fault: bool) -> Result<GradCheckRun> {
    let reports = gradient_check_suite(draws, inject_fault)?;
    let mut passed = true;
    println!("gradient checks ({draws} draws per item, tolerance {GRAD_CHECK_TOLERANCE:.0e}):");
    for r in &reports {
        let status = if r.passed() { "pass" } else { "FAIL" };
        println!(
            "  {:<36} max rel error {:>12.3e}  {status}",
            r.name, r.max_rel_error
        );
        passed &= r.passed();
    }
    println!(
        "gradcheck: {}",
        if passed {
            "all checks passed"
        } else {
            "FAILURES detected"
        }
    );
    Ok(GradCheckRun { reports, passed })
}
