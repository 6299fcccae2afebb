//! Task metrics, pairwise reranking, and paired significance testing.

pub mod metrics;
pub mod ranked;
pub mod rerank;
pub mod trec;
pub mod ttest;

pub use metrics::{macro_f1, mean_average_precision, ndcg_at_k, SEMEVAL_CLASSES};
pub use ranked::{Qrels, RankedList};
pub use rerank::{rerank, PairwiseScorer};
pub use trec::{parse_qrels, parse_run_file, write_run_file};
pub use ttest::{paired_t_test, TTestOutcome};
