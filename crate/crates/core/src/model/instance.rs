//! Training instances for the two tasks.

use crate::data::vocab::PAD_ID;
use crate::error::{Error, Result};

/// A pairwise ranking instance: query plus a preferred and a dispreferred
/// document, all as token ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankInstance {
    pub query: Vec<u32>,
    pub doc_pos: Vec<u32>,
    pub doc_neg: Vec<u32>,
}

impl RankInstance {
    pub fn new(query: Vec<u32>, doc_pos: Vec<u32>, doc_neg: Vec<u32>) -> Result<Self> {
        if query.is_empty() || doc_pos.is_empty() || doc_neg.is_empty() {
            return Err(Error::DegenerateInput(
                "ranking instance needs non-empty query and documents".into(),
            ));
        }
        Ok(Self {
            query,
            doc_pos,
            doc_neg,
        })
    }

    /// Same instance with the two documents swapped.
    pub fn swapped(&self) -> Self {
        Self {
            query: self.query.clone(),
            doc_pos: self.doc_neg.clone(),
            doc_neg: self.doc_pos.clone(),
        }
    }
}

/// A tokenized sentence, right-padded to at least the convolution window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceInstance {
    pub tokens: Vec<u32>,
}

impl SentenceInstance {
    /// Pad `tokens` with the reserved pad id until the convolution window
    /// fits. The unpadded sentence must be non-empty.
    pub fn padded(mut tokens: Vec<u32>, window: usize) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::DegenerateInput(
                "sentence instance needs at least one token".into(),
            ));
        }
        while tokens.len() < window {
            tokens.push(PAD_ID);
        }
        Ok(Self { tokens })
    }
}

/// Either task's instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Rank(RankInstance),
    Sentence(SentenceInstance),
}
