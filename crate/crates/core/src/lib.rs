//! Semi-supervised training with confidence-weighted gradient updates.
//!
//! A target network learns its task from a large weakly-labeled set while a
//! confidence network, trained on a small true-labeled set, scores each weak
//! instance and scales its gradient contribution. The crate provides the
//! numeric layers, the weak annotators (BM25 and lexicon averaging), the two
//! task networks (pairwise ranking and sentence classification), every
//! training strategy and baseline, task metrics with significance testing,
//! and loaders plus synthetic generators for desk-scale experiments.

pub mod annotate;
pub mod data;
pub mod error;
pub mod eval;
pub mod model;
pub mod tensor;
pub mod train;
pub mod verify;

pub use error::{Error, Result};
