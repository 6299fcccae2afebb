//! One-dimensional convolution over a sentence matrix with relu and
//! max-over-positions pooling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::tensor::dense::glorot_limit;
use crate::tensor::matrix::Matrix;

/// A bank of `f` filters, each `m x h`, slid over the columns of an
/// `m x |s|` sentence matrix.
#[derive(Debug, Clone)]
pub struct ConvBank {
    pub filters: Vec<Matrix>,
    pub bias: Vec<f64>,
}

/// Forward cache: for each filter, the argmax position of the relu'd feature
/// vector and the pre-relu value there.
#[derive(Debug, Clone)]
pub struct ConvCache {
    pub argmax: Vec<usize>,
    pub pre_at_max: Vec<f64>,
    pub pooled: Vec<f64>,
}

/// Gradients mirroring the bank layout.
#[derive(Debug, Clone)]
pub struct ConvGrads {
    pub filters: Vec<Matrix>,
    pub bias: Vec<f64>,
}

impl ConvBank {
    pub fn init<R: Rng>(
        embed_dim: usize,
        window: usize,
        filter_count: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if window == 0 || filter_count == 0 {
            return Err(Error::Config(
                "conv bank needs window >= 1 and filter_count >= 1".into(),
            ));
        }
        let fan = embed_dim * window;
        let limit = glorot_limit(fan, fan);
        let filters = (0..filter_count)
            .map(|_| {
                let data: Vec<f64> = (0..embed_dim * window)
                    .map(|_| rng.random_range(-limit..=limit))
                    .collect();
                Matrix::from_vec(embed_dim, window, data).expect("init shape")
            })
            .collect();
        Ok(Self {
            filters,
            bias: vec![0.0; filter_count],
        })
    }

    pub fn filter_count(&self) -> usize {
        self.filters.len()
    }

    pub fn window(&self) -> usize {
        self.filters[0].cols()
    }

    pub fn embed_dim(&self) -> usize {
        self.filters[0].rows()
    }

    /// Slide each filter over the sentence, add its bias, relu, then pool the
    /// largest value. Output has one entry per filter.
    pub fn encode(&self, sentence: &Matrix) -> Result<ConvCache> {
        let h = self.window();
        let n = sentence.cols();
        if sentence.rows() != self.embed_dim() {
            return Err(Error::Shape(format!(
                "sentence rows {} do not match filter rows {}",
                sentence.rows(),
                self.embed_dim()
            )));
        }
        if n < h {
            return Err(Error::DegenerateInput(format!(
                "sentence of {n} columns is shorter than window {h}"
            )));
        }
        let positions = n - h + 1;
        let f = self.filter_count();
        let mut cache = ConvCache {
            argmax: vec![0; f],
            pre_at_max: vec![0.0; f],
            pooled: vec![0.0; f],
        };
        for (r, filter) in self.filters.iter().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for i in 0..positions {
                let mut pre = self.bias[r];
                for k in 0..self.embed_dim() {
                    for j in 0..h {
                        pre += sentence.get(k, i + j) * filter.get(k, j);
                    }
                }
                let act = if pre > 0.0 { pre } else { 0.0 };
                // first max wins on ties, keeping the backward deterministic
                if act > best {
                    best = act;
                    cache.argmax[r] = i;
                    cache.pre_at_max[r] = pre;
                }
            }
            cache.pooled[r] = best;
        }
        Ok(cache)
    }

    /// Backward from dL/d(pooled). Returns bank grads and dL/d(sentence).
    pub fn backward(
        &self,
        sentence: &Matrix,
        cache: &ConvCache,
        grad_out: &[f64],
    ) -> (ConvGrads, Matrix) {
        let h = self.window();
        let m = self.embed_dim();
        let mut grads = ConvGrads {
            filters: self
                .filters
                .iter()
                .map(|f| Matrix::zeros(f.rows(), f.cols()))
                .collect(),
            bias: vec![0.0; self.filter_count()],
        };
        let mut grad_sentence = Matrix::zeros(sentence.rows(), sentence.cols());
        for (r, filter) in self.filters.iter().enumerate() {
            // gradient flows only through the argmax position, gated by relu
            if cache.pre_at_max[r] <= 0.0 {
                continue;
            }
            let g = grad_out[r];
            let i = cache.argmax[r];
            grads.bias[r] += g;
            for k in 0..m {
                for j in 0..h {
                    let v = grads.filters[r].get(k, j) + g * sentence.get(k, i + j);
                    grads.filters[r].set(k, j, v);
                    let s = grad_sentence.get(k, i + j) + g * filter.get(k, j);
                    grad_sentence.set(k, i + j, s);
                }
            }
        }
        (grads, grad_sentence)
    }
}
