//! Round-robin tournament reranking with a pairwise preference model.

use crate::error::{Error, Result};
use crate::eval::ranked::RankedList;

/// Anything that can score the probability of one document ranking above
/// another for a query.
pub trait PairwiseScorer {
    fn preference(&self, query: &[u32], first: &[u32], second: &[u32]) -> Result<f64>;
}

impl<F> PairwiseScorer for F
where
    F: Fn(&[u32], &[u32], &[u32]) -> Result<f64>,
{
    fn preference(&self, query: &[u32], first: &[u32], second: &[u32]) -> Result<f64> {
        self(query, first, second)
    }
}

/// Rerank the head of a candidate list by summed pairwise win probability.
///
/// Candidates arrive in annotator order (best first) as (doc id, tokens).
/// The first `pool_size` form the tournament pool: each pool document is
/// scored s(d) = sum over other pool documents d' of preference(q, d, d').
/// The pool is ranked by s with ties broken by ascending doc id; candidates
/// beyond the pool keep their incoming order below it.
pub fn rerank<S: PairwiseScorer>(
    scorer: &S,
    query_id: &str,
    query: &[u32],
    candidates: &[(String, Vec<u32>)],
    pool_size: usize,
) -> Result<RankedList> {
    if candidates.is_empty() {
        return Err(Error::DegenerateInput(format!(
            "no candidates to rerank for {query_id}"
        )));
    }
    let pool = pool_size.min(candidates.len());
    let mut scored: Vec<(String, f64)> = Vec::with_capacity(candidates.len());
    for (i, (doc_id, tokens)) in candidates.iter().take(pool).enumerate() {
        let mut score = 0.0;
        for (j, (_, other)) in candidates.iter().take(pool).enumerate() {
            if i == j {
                continue;
            }
            score += scorer.preference(query, tokens, other)?;
        }
        scored.push((doc_id.clone(), score));
    }
    // tail keeps the annotator order via strictly decreasing fallback scores
    let floor = scored.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
    let base = if floor.is_finite() { floor } else { 0.0 };
    for (k, (doc_id, _)) in candidates.iter().enumerate().skip(pool) {
        scored.push((doc_id.clone(), base - 1.0 - k as f64));
    }
    RankedList::from_scores(query_id.to_string(), scored)
}
