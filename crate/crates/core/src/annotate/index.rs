//! Inverted index and BM25 scoring.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// BM25 parameters. Defaults follow the usual Indri/Lucene settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
    pub k3: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self {
            k1: 1.2,
            b: 0.75,
            k3: 1000.0,
        }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if self.k1 <= 0.0 || !(0.0..=1.0).contains(&self.b) || self.k3 < 0.0 {
            return Err(Error::Config(format!(
                "bm25 parameters out of range: k1={} b={} k3={}",
                self.k1, self.b, self.k3
            )));
        }
        Ok(())
    }
}

/// Immutable inverted index over a document collection.
#[derive(Debug, Clone)]
pub struct InvertedIndex {
    doc_ids: Vec<String>,
    doc_lengths: Vec<usize>,
    avg_doc_len: f64,
    /// term -> postings sorted by internal doc index
    postings: BTreeMap<String, Vec<(usize, u32)>>,
    id_to_internal: BTreeMap<String, usize>,
}

impl InvertedIndex {
    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    pub fn doc_len(&self, doc_id: &str) -> Option<usize> {
        self.id_to_internal
            .get(doc_id)
            .map(|&i| self.doc_lengths[i])
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn term_freq(&self, term: &str, doc_id: &str) -> u32 {
        let Some(&internal) = self.id_to_internal.get(doc_id) else {
            return 0;
        };
        self.postings
            .get(term)
            .and_then(|list| {
                list.binary_search_by_key(&internal, |&(d, _)| d)
                    .ok()
                    .map(|i| list[i].1)
            })
            .unwrap_or(0)
    }

    pub fn contains_doc(&self, doc_id: &str) -> bool {
        self.id_to_internal.contains_key(doc_id)
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.doc_ids.iter().map(String::as_str)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    /// Lucene-style non-negative idf: ln((N - df + 0.5) / (df + 0.5) + 1).
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.doc_count() as f64;
        let df = self.doc_freq(term) as f64;
        ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
    }
}

/// Build an inverted index from (doc-id, tokens) pairs. Doc ids must be
/// unique and the corpus non-empty; construction is deterministic for a
/// given input order.
pub fn build_index<S: AsRef<str>>(documents: &[(String, Vec<S>)]) -> Result<InvertedIndex> {
    if documents.is_empty() {
        return Err(Error::DegenerateInput(
            "cannot index an empty corpus".into(),
        ));
    }
    let mut id_to_internal = BTreeMap::new();
    let mut doc_ids = Vec::with_capacity(documents.len());
    let mut doc_lengths = Vec::with_capacity(documents.len());
    let mut postings: BTreeMap<String, Vec<(usize, u32)>> = BTreeMap::new();

    for (internal, (doc_id, tokens)) in documents.iter().enumerate() {
        if id_to_internal.insert(doc_id.clone(), internal).is_some() {
            return Err(Error::Validation(format!("duplicate doc id {doc_id:?}")));
        }
        doc_ids.push(doc_id.clone());
        doc_lengths.push(tokens.len());
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t.as_ref()).or_insert(0) += 1;
        }
        for (term, tf) in counts {
            postings
                .entry(term.to_string())
                .or_default()
                .push((internal, tf));
        }
    }
    let total: usize = doc_lengths.iter().sum();
    let avg_doc_len = total as f64 / documents.len() as f64;
    Ok(InvertedIndex {
        doc_ids,
        doc_lengths,
        avg_doc_len,
        postings,
        id_to_internal,
    })
}

/// BM25 score of one document against a query.
///
/// score = sum over query terms of
///   idf(t) * tf (k1+1) / (tf + k1 (1 - b + b len/avglen)) * qtf (k3+1) / (k3 + qtf)
///
/// Repeated query terms are counted through the k3 saturation on query term
/// frequency. Terms absent from the document contribute 0.
pub fn bm25_score<S: AsRef<str>>(
    index: &InvertedIndex,
    params: &Bm25Params,
    query: &[S],
    doc_id: &str,
) -> Result<f64> {
    params.validate()?;
    let Some(&internal) = index.id_to_internal.get(doc_id) else {
        return Err(Error::Lookup(format!("doc id {doc_id:?} not in index")));
    };
    let len = index.doc_lengths[internal] as f64;
    let norm = params.k1 * (1.0 - params.b + params.b * len / index.avg_doc_len);

    let mut qtf: BTreeMap<&str, f64> = BTreeMap::new();
    for t in query {
        *qtf.entry(t.as_ref()).or_insert(0.0) += 1.0;
    }

    let mut score = 0.0;
    for (term, qf) in qtf {
        let tf = index.term_freq(term, doc_id) as f64;
        if tf == 0.0 {
            continue;
        }
        let idf = index.idf(term);
        let doc_part = tf * (params.k1 + 1.0) / (tf + norm);
        let query_part = if params.k3 == 0.0 {
            1.0
        } else {
            qf * (params.k3 + 1.0) / (params.k3 + qf)
        };
        score += idf * doc_part * query_part;
    }
    Ok(score)
}

/// Score every document in the index against a query, sorted by descending
/// score with ties broken by ascending doc id.
pub fn bm25_rank_all<S: AsRef<str>>(
    index: &InvertedIndex,
    params: &Bm25Params,
    query: &[S],
) -> Result<Vec<(String, f64)>> {
    let mut scored: Vec<(String, f64)> = index
        .doc_ids
        .iter()
        .map(|id| bm25_score(index, params, query, id).map(|s| (id.clone(), s)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> (String, Vec<String>) {
        (
            id.to_string(),
            text.split_whitespace().map(str::to_string).collect(),
        )
    }

    #[test]
    fn single_doc_counts() {
        let index = build_index(&[doc("d1", "a b a")]).unwrap();
        assert_eq!(index.doc_freq("a"), 1);
        assert_eq!(index.doc_freq("b"), 1);
        assert_eq!(index.term_freq("a", "d1"), 2);
        assert!((index.avg_doc_len() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn shared_term_has_doc_freq_two() {
        let index = build_index(&[doc("d1", "a b"), doc("d2", "a c")]).unwrap();
        assert_eq!(index.doc_freq("a"), 2);
        assert_eq!(index.doc_freq("b"), 1);
    }

    #[test]
    fn duplicate_doc_id_rejected() {
        let err = build_index(&[doc("d1", "a"), doc("d1", "b")]);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn empty_corpus_rejected() {
        let docs: Vec<(String, Vec<String>)> = Vec::new();
        assert!(matches!(build_index(&docs), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn disjoint_query_scores_zero() {
        let index = build_index(&[doc("d1", "a b c")]).unwrap();
        let s = bm25_score(&index, &Bm25Params::default(), &["x", "y"], "d1").unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn empty_query_scores_zero() {
        let index = build_index(&[doc("d1", "a b c")]).unwrap();
        let s = bm25_score::<&str>(&index, &Bm25Params::default(), &[], "d1").unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn unknown_doc_id_is_lookup_error() {
        let index = build_index(&[doc("d1", "a")]).unwrap();
        assert!(matches!(
            bm25_score(&index, &Bm25Params::default(), &["a"], "nope"),
            Err(Error::Lookup(_))
        ));
    }

    #[test]
    fn three_doc_fixture_matches_hand_evaluated_formula() {
        // Corpus: d1 = "a b a", d2 = "b c", d3 = "a c c a".
        // N = 3, avgdl = (3 + 2 + 4) / 3 = 3. Query "a b", k1 = 1.2, b = 0.75.
        //
        // df(a) = 2 -> idf(a) = ln((3 - 2 + 0.5)/(2 + 0.5) + 1) = ln(1.6)
        // df(b) = 2 -> idf(b) = ln(1.6)
        //
        // d1: len 3, norm = 1.2 (1 - .75 + .75 * 3/3) = 1.2
        //   a: tf 2 -> 2 * 2.2 / (2 + 1.2) = 4.4 / 3.2
        //   b: tf 1 -> 1 * 2.2 / (1 + 1.2) = 2.2 / 2.2
        //   qtf part with k3 = 1000, qf 1: 1001/1001 = 1
        //   score = ln(1.6) * (4.4/3.2 + 1.0)
        let index =
            build_index(&[doc("d1", "a b a"), doc("d2", "b c"), doc("d3", "a c c a")]).unwrap();
        let params = Bm25Params::default();
        let idf = 1.6f64.ln();

        let s1 = bm25_score(&index, &params, &["a", "b"], "d1").unwrap();
        let want1 = idf * (4.4 / 3.2 + 1.0);
        assert!((s1 - want1).abs() < 1e-9, "{s1} vs {want1}");

        // d2: len 2, norm = 1.2 (0.25 + 0.75 * 2/3) = 1.2 * 0.75 = 0.9
        //   b: tf 1 -> 2.2 / 1.9; a absent
        let s2 = bm25_score(&index, &params, &["a", "b"], "d2").unwrap();
        let want2 = idf * (2.2 / 1.9);
        assert!((s2 - want2).abs() < 1e-9, "{s2} vs {want2}");

        // d3: len 4, norm = 1.2 (0.25 + 0.75 * 4/3) = 1.2 * 1.25 = 1.5
        //   a: tf 2 -> 4.4 / 3.5; b absent
        let s3 = bm25_score(&index, &params, &["a", "b"], "d3").unwrap();
        let want3 = idf * (4.4 / 3.5);
        assert!((s3 - want3).abs() < 1e-9, "{s3} vs {want3}");
    }

    #[test]
    fn repeated_query_terms_saturate_with_k3() {
        let index = build_index(&[doc("d1", "a b a"), doc("d2", "b c")]).unwrap();
        let params = Bm25Params::default();
        let once = bm25_score(&index, &params, &["a"], "d1").unwrap();
        let twice = bm25_score(&index, &params, &["a", "a"], "d1").unwrap();
        // qf 2 with k3 = 1000: 2 * 1001 / 1002, just shy of doubling
        let expect = once * 2.0 * 1001.0 / 1002.0;
        assert!((twice - expect).abs() < 1e-12);
    }

    #[test]
    fn doc_freq_matches_naive_recount_on_random_corpus() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let vocab: Vec<String> = (0..20).map(|i| format!("t{i}")).collect();
        let docs: Vec<(String, Vec<String>)> = (0..100)
            .map(|d| {
                let len = rng.random_range(1..=12);
                let toks = (0..len)
                    .map(|_| vocab[rng.random_range(0..vocab.len())].clone())
                    .collect();
                (format!("d{d}"), toks)
            })
            .collect();
        let index = build_index(&docs).unwrap();
        for term in &vocab {
            let brute = docs
                .iter()
                .filter(|(_, toks)| toks.iter().any(|t| t == term))
                .count();
            assert_eq!(index.doc_freq(term), brute, "term {term}");
        }
    }
}
