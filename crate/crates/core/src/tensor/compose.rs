//! Softmax-weighted composition of embedding columns into a single vector.

use crate::error::{Error, Result};
use crate::tensor::activation::softmax;
use crate::tensor::matrix::Matrix;

/// Forward cache for [`term_weighted_composition`].
#[derive(Debug, Clone)]
pub struct ComposeCache {
    /// Softmax of the per-position weights.
    pub probs: Vec<f64>,
    pub out: Vec<f64>,
}

/// Compose columns of `embeds` (`m x n`) into one vector of length `m` using
/// softmax(weights) as mixing coefficients. Adding a constant to all weights
/// leaves the output unchanged.
pub fn term_weighted_composition(embeds: &Matrix, weights: &[f64]) -> Result<ComposeCache> {
    let n = embeds.cols();
    if n == 0 {
        return Err(Error::DegenerateInput(
            "composition over zero columns".into(),
        ));
    }
    if weights.len() != n {
        return Err(Error::Shape(format!(
            "composition expects {n} weights, got {}",
            weights.len()
        )));
    }
    let probs = softmax(weights);
    let m = embeds.rows();
    let mut out = vec![0.0; m];
    for (i, &p) in probs.iter().enumerate() {
        for (r, o) in out.iter_mut().enumerate() {
            *o += p * embeds.get(r, i);
        }
    }
    Ok(ComposeCache { probs, out })
}

/// Backward pass. Returns (dL/d embeds as `m x n`, dL/d weights length n).
///
/// With p = softmax(w) and out = sum_i p_i e_i:
///   d out / d e_i = p_i * I
///   d out / d w_i = p_i (e_i - out)
#[allow(clippy::needless_range_loop)]
pub fn composition_backward(
    embeds: &Matrix,
    cache: &ComposeCache,
    grad_out: &[f64],
) -> (Matrix, Vec<f64>) {
    let (m, n) = (embeds.rows(), embeds.cols());
    debug_assert_eq!(grad_out.len(), m);
    let mut grad_embeds = Matrix::zeros(m, n);
    let mut grad_weights = vec![0.0; n];
    for i in 0..n {
        let p = cache.probs[i];
        let mut dot = 0.0;
        for r in 0..m {
            grad_embeds.set(r, i, p * grad_out[r]);
            dot += grad_out[r] * (embeds.get(r, i) - cache.out[r]);
        }
        grad_weights[i] = p * dot;
    }
    (grad_embeds, grad_weights)
}
