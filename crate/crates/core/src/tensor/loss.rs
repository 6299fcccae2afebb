//! Cross-entropy losses with clamped logs.
//!
//! Predictions are clamped to [1e-7, 1 - 1e-7] before any log, so finite
//! inputs can never produce NaN. The gradient with respect to the
//! pre-activation logits is `p - t` in both the binary and categorical case.

use crate::error::{Error, Result};

/// Clamp bound applied to predicted probabilities before logs.
pub const PROB_CLAMP: f64 = 1e-7;

#[inline]
fn clamp(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// `-t ln p - (1-t) ln(1-p)` with soft targets allowed.
pub fn binary_cross_entropy(target: f64, predicted: f64) -> f64 {
    let p = clamp(predicted);
    -target * p.ln() - (1.0 - target) * (1.0 - p).ln()
}

/// `-sum_k t_k ln p_k` over distributions that each sum to 1 within 1e-6.
pub fn categorical_cross_entropy(target: &[f64], predicted: &[f64]) -> Result<f64> {
    if target.len() != predicted.len() {
        return Err(Error::Shape(format!(
            "target has {} classes, prediction {}",
            target.len(),
            predicted.len()
        )));
    }
    for (name, dist) in [("target", target), ("prediction", predicted)] {
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Validation(format!(
                "{name} distribution sums to {sum}"
            )));
        }
    }
    Ok(target
        .iter()
        .zip(predicted)
        .map(|(&t, &p)| -t * clamp(p).ln())
        .sum())
}

/// dL/d(logit) for a sigmoid + binary cross-entropy head.
#[inline]
pub fn bce_logit_delta(target: f64, predicted: f64) -> f64 {
    predicted - target
}

/// dL/d(logits) for a softmax + categorical cross-entropy head.
pub fn cce_logit_delta(target: &[f64], predicted: &[f64]) -> Vec<f64> {
    predicted.iter().zip(target).map(|(&p, &t)| p - t).collect()
}
