//! Ranked result lists and relevance judgments.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// One query's ranking: doc ids with scores, descending, ties broken by
/// ascending doc id, no duplicates.
#[derive(Debug, Clone)]
pub struct RankedList {
    pub query_id: String,
    entries: Vec<(String, f64)>,
}

impl RankedList {
    /// Sort scored documents into a ranked list. Duplicate doc ids are
    /// rejected; NaN scores are rejected.
    pub fn from_scores(query_id: String, mut scored: Vec<(String, f64)>) -> Result<Self> {
        if scored.iter().any(|(_, s)| s.is_nan()) {
            return Err(Error::Validation(format!(
                "NaN score in ranking for {query_id}"
            )));
        }
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("scores are not NaN")
                .then_with(|| a.0.cmp(&b.0))
        });
        for pair in scored.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Validation(format!(
                    "duplicate doc id {:?} in ranking for {query_id}",
                    pair[0].0
                )));
            }
        }
        // also catch duplicates that are not adjacent after the sort
        let mut ids: Vec<&str> = scored.iter().map(|(d, _)| d.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!(
                "duplicate doc id in ranking for {query_id}"
            )));
        }
        Ok(Self {
            query_id,
            entries: scored,
        })
    }

    /// Doc ids in rank order.
    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(d, _)| d.as_str())
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Graded relevance judgments: (query id, doc id) -> grade >= 0.
#[derive(Debug, Clone, Default)]
pub struct Qrels {
    grades: BTreeMap<(String, String), u32>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: u32) {
        self.grades
            .insert((query_id.to_string(), doc_id.to_string()), grade);
    }

    pub fn grade(&self, query_id: &str, doc_id: &str) -> u32 {
        self.grades
            .get(&(query_id.to_string(), doc_id.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// All grades recorded for one query, in doc-id order.
    pub fn grades_for(&self, query_id: &str) -> Vec<(String, u32)> {
        self.grades
            .range((query_id.to_string(), String::new())..)
            .take_while(|((q, _), _)| q == query_id)
            .map(|((_, d), &g)| (d.clone(), g))
            .collect()
    }

    /// Number of relevant (grade >= 1) documents for one query.
    pub fn relevant_count(&self, query_id: &str) -> usize {
        self.grades_for(query_id)
            .iter()
            .filter(|(_, g)| *g >= 1)
            .count()
    }

    pub fn query_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.grades.keys().map(|(q, _)| q.clone()).collect();
        ids.dedup();
        ids
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u32)> {
        self.grades
            .iter()
            .map(|((q, d), &g)| (q.as_str(), d.as_str(), g))
    }
}
