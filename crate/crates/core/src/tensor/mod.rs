//! Minimal dense numeric layer: forward transforms and exact gradients for
//! every layer type the networks need, plus Adam and a gradient checker.
//!
//! Everything is 64-bit. No operation emits NaN or Inf for finite inputs;
//! losses clamp probabilities before logs and softmax is max-shifted.

pub mod activation;
pub mod adam;
pub mod compose;
pub mod conv;
pub mod dense;
pub mod dropout;
pub mod embedding;
pub mod gradcheck;
pub mod loss;
pub mod matrix;

pub use activation::{sigmoid, softmax, Activation};
pub use adam::AdamState;
pub use compose::{composition_backward, term_weighted_composition, ComposeCache};
pub use conv::{ConvBank, ConvCache, ConvGrads};
pub use dense::{glorot_limit, DenseCache, DenseGrads, DenseLayer};
pub use dropout::{dropout_apply, dropout_mask, DropoutMask, Mode};
pub use embedding::EmbeddingTable;
pub use gradcheck::grad_check;
pub use loss::{
    bce_logit_delta, binary_cross_entropy, categorical_cross_entropy, cce_logit_delta, PROB_CLAMP,
};
pub use matrix::Matrix;
