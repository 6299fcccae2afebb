//! Element-wise and vector activations with exact derivatives.

use serde::{Deserialize, Serialize};

/// Activation applied after an affine transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Sigmoid,
    Softmax,
    Identity,
}

impl Activation {
    /// Apply to a pre-activation vector.
    pub fn apply(self, pre: &[f64]) -> Vec<f64> {
        match self {
            Activation::Relu => pre.iter().map(|&z| if z > 0.0 { z } else { 0.0 }).collect(),
            Activation::Sigmoid => pre.iter().map(|&z| sigmoid(z)).collect(),
            Activation::Softmax => softmax(pre),
            Activation::Identity => pre.to_vec(),
        }
    }

    /// Chain `grad_out` (dL/d activation output) back to dL/d pre-activation.
    ///
    /// `pre` is the pre-activation vector, `out` the activation output.
    /// The relu derivative at exactly 0 is 0.
    pub fn backward(self, pre: &[f64], out: &[f64], grad_out: &[f64]) -> Vec<f64> {
        match self {
            Activation::Relu => pre
                .iter()
                .zip(grad_out)
                .map(|(&z, &g)| if z > 0.0 { g } else { 0.0 })
                .collect(),
            Activation::Sigmoid => out
                .iter()
                .zip(grad_out)
                .map(|(&a, &g)| g * a * (1.0 - a))
                .collect(),
            Activation::Softmax => {
                // Full Jacobian-vector product: dz_i = p_i (g_i - sum_j g_j p_j)
                let dot: f64 = out.iter().zip(grad_out).map(|(&p, &g)| p * g).sum();
                out.iter()
                    .zip(grad_out)
                    .map(|(&p, &g)| p * (g - dot))
                    .collect()
            }
            Activation::Identity => grad_out.to_vec(),
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Max-shifted softmax; outputs sum to 1 and are invariant under adding a
/// constant to all logits.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_zeroes_negatives() {
        assert_eq!(Activation::Relu.apply(&[-1.0, 2.0]), vec![0.0, 2.0]);
    }

    #[test]
    fn relu_gradient_at_zero_is_zero() {
        let g = Activation::Relu.backward(&[0.0, 1.0], &[0.0, 1.0], &[5.0, 5.0]);
        assert_eq!(g, vec![0.0, 5.0]);
    }

    #[test]
    fn softmax_uniform_on_equal_logits() {
        let p = softmax(&[0.0, 0.0, 0.0]);
        for &v in &p {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_shift_invariant() {
        let a = softmax(&[1.0, -2.0, 0.5]);
        let b = softmax(&[101.0, 98.0, 100.5]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn softmax_survives_large_logits() {
        let p = softmax(&[1000.0, 999.0]);
        assert!(p.iter().all(|v| v.is_finite()));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
