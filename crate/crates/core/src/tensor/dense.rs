//! Fully connected layer: `out = activation(W input + b)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::tensor::activation::Activation;
use crate::tensor::matrix::Matrix;

/// A dense layer. Weights are `out_dim x in_dim`, bias has length `out_dim`.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

/// Forward cache needed for an exact backward pass.
#[derive(Debug, Clone)]
pub struct DenseCache {
    pub pre: Vec<f64>,
    pub out: Vec<f64>,
}

/// Gradients for one dense layer, same layout as the parameters.
#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    /// Uniform init in +/- sqrt(6 / (fan_in + fan_out)), zero bias.
    pub fn init<R: Rng>(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let limit = glorot_limit(in_dim, out_dim);
        let data: Vec<f64> = (0..out_dim * in_dim)
            .map(|_| rng.random_range(-limit..=limit))
            .collect();
        Self {
            weights: Matrix::from_vec(out_dim, in_dim, data).expect("init shape"),
            bias: vec![0.0; out_dim],
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    /// Forward pass; errors if the input width does not match.
    pub fn apply(&self, input: &[f64]) -> Result<DenseCache> {
        if input.len() != self.in_dim() {
            return Err(Error::Shape(format!(
                "dense layer expects input of {}, got {}",
                self.in_dim(),
                input.len()
            )));
        }
        let mut pre = self.bias.clone();
        for (r, p) in pre.iter_mut().enumerate() {
            let row = self.weights.row(r);
            *p += row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
        }
        let out = self.activation.apply(&pre);
        Ok(DenseCache { pre, out })
    }

    /// Backward from dL/d(output). Returns parameter grads and dL/d(input).
    pub fn backward(
        &self,
        input: &[f64],
        cache: &DenseCache,
        grad_out: &[f64],
    ) -> (DenseGrads, Vec<f64>) {
        let delta = self.activation.backward(&cache.pre, &cache.out, grad_out);
        self.backward_from_pre(input, &delta)
    }

    /// Backward from dL/d(pre-activation). This is the entry used by
    /// cross-entropy heads, where the delta at the logits is `p - t`.
    pub fn backward_from_pre(&self, input: &[f64], delta: &[f64]) -> (DenseGrads, Vec<f64>) {
        let (out_dim, in_dim) = (self.out_dim(), self.in_dim());
        debug_assert_eq!(delta.len(), out_dim);
        debug_assert_eq!(input.len(), in_dim);

        let mut grad_w = vec![0.0; out_dim * in_dim];
        for (r, &d) in delta.iter().enumerate() {
            let row = &mut grad_w[r * in_dim..(r + 1) * in_dim];
            for (g, &x) in row.iter_mut().zip(input) {
                *g = d * x;
            }
        }
        let mut grad_input = vec![0.0; in_dim];
        for (r, &d) in delta.iter().enumerate() {
            let row = self.weights.row(r);
            for (gi, &w) in grad_input.iter_mut().zip(row) {
                *gi += d * w;
            }
        }
        (
            DenseGrads {
                weights: grad_w,
                bias: delta.to_vec(),
            },
            grad_input,
        )
    }
}

/// Shared init bound for dense and convolution parameters.
pub fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_layer(n: usize) -> DenseLayer {
        let mut w = Matrix::zeros(n, n);
        for i in 0..n {
            w.set(i, i, 1.0);
        }
        DenseLayer {
            weights: w,
            bias: vec![0.0; n],
            activation: Activation::Identity,
        }
    }

    #[test]
    fn identity_weights_pass_input_through() {
        let layer = identity_layer(3);
        let out = layer.apply(&[1.0, -2.0, 0.5]).unwrap().out;
        assert_eq!(out, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn relu_pre_activation() {
        let mut layer = identity_layer(2);
        layer.activation = Activation::Relu;
        let out = layer.apply(&[-1.0, 2.0]).unwrap().out;
        assert_eq!(out, vec![0.0, 2.0]);
    }

    #[test]
    fn softmax_symmetric_on_zero_logits() {
        let layer = DenseLayer {
            weights: Matrix::zeros(3, 2),
            bias: vec![0.0; 3],
            activation: Activation::Softmax,
        };
        let out = layer.apply(&[0.4, -0.3]).unwrap().out;
        for &v in &out {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let layer = identity_layer(3);
        assert!(matches!(
            layer.apply(&[1.0]),
            Err(crate::error::Error::Shape(_))
        ));
    }
}
