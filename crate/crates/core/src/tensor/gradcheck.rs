//! Central-difference gradient checking.

use crate::error::{Error, Result};

/// Compare an analytic gradient against central finite differences of a
/// deterministic scalar loss.
///
/// Returns the maximum over coordinates of |a - n| / max(1, |a| + |n|).
/// The closure receives the full parameter vector and must be a pure
/// function of it; two evaluations at the same point that differ reject
/// the check.
pub fn grad_check<F>(
    mut loss: F,
    params: &[f64],
    analytic: &[f64],
    perturbation: f64,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(1e-6..=1e-3).contains(&perturbation) {
        return Err(Error::Config(format!(
            "perturbation {perturbation} outside [1e-6, 1e-3]"
        )));
    }
    if params.len() != analytic.len() {
        return Err(Error::Shape(format!(
            "{} params but {} analytic gradient entries",
            params.len(),
            analytic.len()
        )));
    }
    let base = loss(params);
    let again = loss(params);
    if base != again {
        return Err(Error::Determinism(format!(
            "loss evaluated twice at the same point gave {base} and {again}"
        )));
    }

    let mut work = params.to_vec();
    let mut max_err: f64 = 0.0;
    for i in 0..params.len() {
        let orig = work[i];
        work[i] = orig + perturbation;
        let plus = loss(&work);
        work[i] = orig - perturbation;
        let minus = loss(&work);
        work[i] = orig;
        let numeric = (plus - minus) / (2.0 * perturbation);
        let a = analytic[i];
        let err = (a - numeric).abs() / f64::max(1.0, a.abs() + numeric.abs());
        max_err = max_err.max(err);
    }
    Ok(max_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::activation::sigmoid;
    use crate::tensor::loss::binary_cross_entropy;

    #[test]
    fn linear_loss_has_all_ones_gradient() {
        let params = [0.3, -1.2, 4.0];
        let analytic = [1.0, 1.0, 1.0];
        let err = grad_check(|w| w.iter().sum(), &params, &analytic, 1e-4).unwrap();
        assert!(err < 1e-10, "max rel err {err}");
    }

    #[test]
    fn dense_sigmoid_bce_composite() {
        // loss(w) = BCE(1, sigmoid(w . x)); dL/dw = (p - 1) x
        let x = [0.5, -1.0, 2.0];
        let w = [0.1, 0.2, -0.3];
        let loss = |w: &[f64]| {
            let z: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
            binary_cross_entropy(1.0, sigmoid(z))
        };
        let z: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        let p = sigmoid(z);
        let analytic: Vec<f64> = x.iter().map(|&xi| (p - 1.0) * xi).collect();
        let err = grad_check(loss, &w, &analytic, 1e-4).unwrap();
        assert!(err < 1e-4, "max rel err {err}");
    }

    #[test]
    fn corrupted_gradient_is_reported() {
        let x = [0.5, -1.0, 2.0];
        let w = [0.1, 0.2, -0.3];
        let loss = |w: &[f64]| {
            let z: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
            binary_cross_entropy(1.0, sigmoid(z))
        };
        let z: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        let p = sigmoid(z);
        let mut analytic: Vec<f64> = x.iter().map(|&xi| (p - 1.0) * xi).collect();
        analytic[2] *= 2.0;
        let err = grad_check(loss, &w, &analytic, 1e-4).unwrap();
        assert!(err > 0.3, "fault not detected, err {err}");
    }

    #[test]
    fn nondeterministic_closure_rejected() {
        let mut calls = 0u32;
        let loss = |_: &[f64]| {
            calls += 1;
            calls as f64
        };
        assert!(matches!(
            grad_check(loss, &[1.0], &[0.0], 1e-4),
            Err(Error::Determinism(_))
        ));
    }

    #[test]
    fn perturbation_range_enforced() {
        assert!(grad_check(|_| 0.0, &[1.0], &[0.0], 1e-7).is_err());
        assert!(grad_check(|_| 0.0, &[1.0], &[0.0], 1e-2).is_err());
    }
}
