//! Weak annotators and confidence targets.
//!
//! BM25 over an inverted index labels ranking pairs; averaged lexicon
//! distributions label sentences. Confidence targets measure how far a weak
//! label sits from the true one.

pub mod index;
pub mod labels;
pub mod lexicon;

pub use index::{bm25_rank_all, bm25_score, build_index, Bm25Params, InvertedIndex};
pub use labels::{
    confidence_target_class, confidence_target_rank, pairwise_weak_label, ConfidenceTarget,
    WeakLabel,
};
pub use lexicon::{lexicon_annotate, SentimentLexicon, SENTIMENT_CLASSES};
