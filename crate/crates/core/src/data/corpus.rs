//! Corpus loaders and training-set assembly.
//!
//! Formats: `docs.tsv` and `queries.tsv` are `id<TAB>text`; qrels are TREC
//! 4-column; sentences are JSONL objects with `id`, `text`, and an optional
//! `label` of positive / negative / neutral.

use std::io::BufRead;
use std::path::Path;

use serde::Deserialize;

use crate::annotate::index::{bm25_rank_all, bm25_score, Bm25Params, InvertedIndex};
use crate::annotate::labels::{
    confidence_target_class, confidence_target_rank, pairwise_weak_label, WeakLabel,
};
use crate::annotate::lexicon::{lexicon_annotate, SentimentLexicon, SENTIMENT_CLASSES};
use crate::data::tokenize::tokenize;
use crate::data::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::eval::ranked::Qrels;
use crate::eval::trec::parse_qrels;
use crate::model::{Instance, RankInstance, SentenceInstance};
use crate::train::sets::{FullExample, LabeledSets, WeakExample};

/// A loaded ranking collection.
#[derive(Debug, Clone)]
pub struct RankingCorpus {
    /// (doc id, tokens) in file order.
    pub documents: Vec<(String, Vec<String>)>,
    /// (query id, tokens) in file order.
    pub queries: Vec<(String, Vec<String>)>,
    pub qrels: Qrels,
    pub vocab: Vocabulary,
}

fn load_id_text_tsv(path: &Path, what: &str) -> Result<Vec<(String, Vec<String>)>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let Some((id, text)) = line.split_once('\t') else {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("{what} line needs id<TAB>text"),
            });
        };
        if id.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("empty {what} id"),
            });
        }
        rows.push((id.to_string(), tokenize(text)));
    }
    Ok(rows)
}

/// Load documents, queries, and qrels; build the vocabulary over both text
/// collections.
pub fn load_ranking_corpus(docs: &Path, queries: &Path, qrels: &Path) -> Result<RankingCorpus> {
    let documents = load_id_text_tsv(docs, "document")?;
    let queries = load_id_text_tsv(queries, "query")?;
    let qrels = parse_qrels(qrels)?;
    let vocab = Vocabulary::build(
        documents
            .iter()
            .map(|(_, t)| t.as_slice())
            .chain(queries.iter().map(|(_, t)| t.as_slice())),
    );
    Ok(RankingCorpus {
        documents,
        queries,
        qrels,
        vocab,
    })
}

/// Knobs of the pairwise set assembly.
#[derive(Debug, Clone)]
pub struct RankSetOptions {
    /// Candidates harvested per unlabeled query.
    pub top_k: usize,
    pub bm25: Bm25Params,
}

impl Default for RankSetOptions {
    fn default() -> Self {
        Self {
            top_k: 50,
            bm25: Bm25Params::default(),
        }
    }
}

/// The assembled pairwise sets plus any queries skipped for lack of
/// candidates.
#[derive(Debug, Clone)]
pub struct RankSets {
    pub sets: LabeledSets,
    pub skipped_queries: Vec<String>,
}

/// Grade comparison: 1 if the first grade is higher, 0.5 on ties, else 0.
pub fn grade_preference(grade_pos: u32, grade_neg: u32) -> f64 {
    match grade_pos.cmp(&grade_neg) {
        std::cmp::Ordering::Greater => 1.0,
        std::cmp::Ordering::Equal => 0.5,
        std::cmp::Ordering::Less => 0.0,
    }
}

/// Build the weak pairwise set from unlabeled queries (all combinations of
/// their top-k candidates, preference from the annotator score ratio) and
/// the full set from judged queries (relevant x non-relevant pairs with the
/// true preference from grade comparison and confidence targets attached).
pub fn build_rank_sets(
    corpus: &RankingCorpus,
    index: &InvertedIndex,
    options: &RankSetOptions,
) -> Result<RankSets> {
    let doc_tokens: std::collections::HashMap<&str, &[String]> = corpus
        .documents
        .iter()
        .map(|(id, toks)| (id.as_str(), toks.as_slice()))
        .collect();
    let encode = |tokens: &[String]| corpus.vocab.encode(tokens);

    let mut sets = LabeledSets::default();
    let mut skipped = Vec::new();

    for (query_id, query_tokens) in &corpus.queries {
        let judged = corpus.qrels.grades_for(query_id);
        let query_ids = encode(query_tokens);
        if query_ids.is_empty() {
            skipped.push(query_id.clone());
            eprintln!("warning: query {query_id} has no tokens, skipped");
            continue;
        }

        if !judged.is_empty() {
            // full-set pairs: all relevant docs x an equal number of
            // non-relevant docs
            let rel: Vec<&(String, u32)> = judged.iter().filter(|(_, g)| *g >= 1).collect();
            let nonrel: Vec<&(String, u32)> = judged.iter().filter(|(_, g)| *g == 0).collect();
            if rel.is_empty() || nonrel.is_empty() {
                skipped.push(query_id.clone());
                eprintln!("warning: query {query_id} lacks a judged pair, skipped");
                continue;
            }
            let take_nonrel = nonrel.len().min(rel.len());
            for (pos_id, pos_grade) in rel.iter().map(|r| (r.0.as_str(), r.1)) {
                for (neg_id, neg_grade) in
                    nonrel.iter().take(take_nonrel).map(|r| (r.0.as_str(), r.1))
                {
                    let (Some(pos_toks), Some(neg_toks)) =
                        (doc_tokens.get(pos_id), doc_tokens.get(neg_id))
                    else {
                        return Err(Error::Lookup(format!(
                            "qrels reference unknown document for query {query_id}"
                        )));
                    };
                    let truth = grade_preference(pos_grade, neg_grade);
                    let s_pos = bm25_score(index, &options.bm25, query_tokens, pos_id)?;
                    let s_neg = bm25_score(index, &options.bm25, query_tokens, neg_id)?;
                    let WeakLabel::Scalar(weak) = pairwise_weak_label(s_pos, s_neg)? else {
                        unreachable!()
                    };
                    let confidence = confidence_target_rank(truth, weak)?;
                    let instance =
                        RankInstance::new(query_ids.clone(), encode(pos_toks), encode(neg_toks))?;
                    sets.full.push(FullExample {
                        instance: Instance::Rank(instance),
                        weak: WeakLabel::Scalar(weak),
                        truth: WeakLabel::Scalar(truth),
                        confidence,
                    });
                }
            }
        } else {
            // weak-set pairs: combinations of the top-k annotator candidates
            let ranked = bm25_rank_all(index, &options.bm25, query_tokens)?;
            let candidates: Vec<(String, f64)> = ranked
                .into_iter()
                .filter(|(_, s)| *s > 0.0)
                .take(options.top_k)
                .collect();
            if candidates.len() < 2 {
                skipped.push(query_id.clone());
                eprintln!("warning: query {query_id} has fewer than 2 candidates, skipped");
                continue;
            }
            for i in 0..candidates.len() {
                for j in (i + 1)..candidates.len() {
                    let (pos_id, s_pos) = (&candidates[i].0, candidates[i].1);
                    let (neg_id, s_neg) = (&candidates[j].0, candidates[j].1);
                    let weak = pairwise_weak_label(s_pos, s_neg)?;
                    let instance = RankInstance::new(
                        query_ids.clone(),
                        encode(doc_tokens[pos_id.as_str()]),
                        encode(doc_tokens[neg_id.as_str()]),
                    )?;
                    sets.weak.push(WeakExample {
                        instance: Instance::Rank(instance),
                        weak,
                    });
                }
            }
        }
    }
    Ok(RankSets {
        sets,
        skipped_queries: skipped,
    })
}

/// One sentence record; `label` is the gold class when present.
#[derive(Debug, Clone)]
pub struct SentimentRecord {
    pub id: String,
    pub tokens: Vec<String>,
    pub label: Option<usize>,
}

#[derive(Deserialize)]
struct RawSentence {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<String>,
}

/// Class name to index: positive 0, negative 1, neutral 2.
pub fn class_index(label: &str) -> Option<usize> {
    match label {
        "positive" => Some(0),
        "negative" => Some(1),
        "neutral" => Some(2),
        _ => None,
    }
}

pub fn class_name(index: usize) -> &'static str {
    ["positive", "negative", "neutral"][index]
}

/// Load a JSONL sentence corpus and build its vocabulary. Records with a
/// label are gold-eligible; the rest feed the weak pool.
pub fn load_sentiment_corpus(path: &Path) -> Result<(Vec<SentimentRecord>, Vocabulary)> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawSentence = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad sentence object: {e}"),
        })?;
        let label = match raw.label.as_deref() {
            None => None,
            Some(name) => Some(class_index(name).ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("unknown label {name:?}"),
            })?),
        };
        records.push(SentimentRecord {
            id: raw.id,
            tokens: tokenize(&raw.text),
            label,
        });
    }
    let vocab = Vocabulary::build(records.iter().map(|r| r.tokens.as_slice()));
    Ok((records, vocab))
}

/// One-hot distribution for a class index.
pub fn one_hot(class: usize) -> Vec<f64> {
    let mut d = vec![0.0; SENTIMENT_CLASSES];
    d[class] = 1.0;
    d
}

/// Assemble sentiment training sets: the weak pool gets annotator labels;
/// gold records additionally carry the one-hot truth and the confidence
/// target.
pub fn assemble_sentiment_sets(
    gold: &[SentimentRecord],
    unlabeled: &[SentimentRecord],
    lexicon: &SentimentLexicon,
    vocab: &Vocabulary,
    window: usize,
) -> Result<LabeledSets> {
    let mut sets = LabeledSets::default();
    for record in unlabeled {
        if record.tokens.is_empty() {
            continue;
        }
        let weak = lexicon_annotate(lexicon, &record.tokens);
        let instance = SentenceInstance::padded(vocab.encode(&record.tokens), window)?;
        sets.weak.push(WeakExample {
            instance: Instance::Sentence(instance),
            weak,
        });
    }
    for record in gold {
        if record.tokens.is_empty() {
            continue;
        }
        let Some(class) = record.label else {
            return Err(Error::Validation(format!(
                "record {} lacks a gold label",
                record.id
            )));
        };
        let weak = lexicon_annotate(lexicon, &record.tokens);
        let truth = one_hot(class);
        let WeakLabel::Distribution(weak_dist) = &weak else {
            unreachable!()
        };
        let confidence = confidence_target_class(&truth, weak_dist)?;
        let instance = SentenceInstance::padded(vocab.encode(&record.tokens), window)?;
        sets.full.push(FullExample {
            instance: Instance::Sentence(instance),
            weak,
            truth: WeakLabel::Distribution(truth),
            confidence,
        });
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::index::build_index;

    fn write(dir: &str, name: &str, content: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(dir);
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn three_doc_fixture_round_trips() {
        let docs = write(
            "cws_corpus1",
            "docs.tsv",
            "d1\tApple pie recipe\nd2\tCar repair\nd3\tpie crust\n",
        );
        let queries = write(
            "cws_corpus1",
            "queries.tsv",
            "q1\tapple pie\nq2\tengine repair\n",
        );
        let qrels = write("cws_corpus1", "qrels.txt", "q1 0 d1 1\nq1 0 d2 0\n");
        let corpus = load_ranking_corpus(&docs, &queries, &qrels).unwrap();
        assert_eq!(corpus.documents.len(), 3);
        assert_eq!(corpus.documents[0].1, vec!["apple", "pie", "recipe"]);
        assert_eq!(corpus.queries.len(), 2);
        assert_eq!(corpus.qrels.grade("q1", "d1"), 1);
    }

    #[test]
    fn vocabulary_matches_distinct_token_recount() {
        let docs = write("cws_corpus2", "docs.tsv", "d1\ta b a c\nd2\tc d e\n");
        let queries = write("cws_corpus2", "queries.tsv", "q1\te f\n");
        let qrels = write("cws_corpus2", "qrels.txt", "q1 0 d1 1\n");
        let corpus = load_ranking_corpus(&docs, &queries, &qrels).unwrap();
        let mut distinct: std::collections::HashSet<&str> = std::collections::HashSet::new();
        for (_, toks) in corpus.documents.iter().chain(corpus.queries.iter()) {
            for t in toks {
                distinct.insert(t);
            }
        }
        // +2 for the reserved pad and unk entries
        assert_eq!(corpus.vocab.len(), distinct.len() + 2);
    }

    #[test]
    fn malformed_doc_line_is_positioned() {
        let docs = write("cws_corpus3", "docs.tsv", "d1\tok text\nbroken-line\n");
        let queries = write("cws_corpus3", "queries.tsv", "q1\tx\n");
        let qrels = write("cws_corpus3", "qrels.txt", "q1 0 d1 1\n");
        match load_ranking_corpus(&docs, &queries, &qrels) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn judged_pair_becomes_one_full_example() {
        let docs = write(
            "cws_sets1",
            "docs.tsv",
            "d1\tapple pie\nd2\tcar repair\nd3\tapple tart\n",
        );
        let queries = write("cws_sets1", "queries.tsv", "q1\tapple\n");
        let qrels = write("cws_sets1", "qrels.txt", "q1 0 d1 1\nq1 0 d2 0\n");
        let corpus = load_ranking_corpus(&docs, &queries, &qrels).unwrap();
        let index = build_index(&corpus.documents).unwrap();
        let built = build_rank_sets(&corpus, &index, &RankSetOptions::default()).unwrap();
        assert_eq!(built.sets.full.len(), 1);
        let ex = &built.sets.full[0];
        assert_eq!(ex.truth, WeakLabel::Scalar(1.0));
        // d1 matches the query, d2 does not: weak label 1.0, confidence 1.0
        assert_eq!(ex.weak, WeakLabel::Scalar(1.0));
        assert!((ex.confidence.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_scores_give_weak_half() {
        assert_eq!(
            pairwise_weak_label(0.0, 0.0).unwrap(),
            WeakLabel::Scalar(0.5)
        );
    }

    #[test]
    fn weak_pair_count_is_choose_two_over_candidates() {
        // one unlabeled query whose terms hit 4 documents: C(4,2) = 6 pairs
        let docs = write(
            "cws_sets2",
            "docs.tsv",
            "d1\tapple one\nd2\tapple two\nd3\tapple three\nd4\tapple four\nd5\tzebra\n",
        );
        let queries = write("cws_sets2", "queries.tsv", "qU\tapple\n");
        let qrels = write("cws_sets2", "qrels.txt", "qZ 0 d5 1\n");
        let corpus = load_ranking_corpus(&docs, &queries, &qrels).unwrap();
        let index = build_index(&corpus.documents).unwrap();
        let built = build_rank_sets(&corpus, &index, &RankSetOptions::default()).unwrap();
        assert_eq!(built.sets.weak.len(), 6);
        // weak preferences from a ranked harvest never fall below one half
        for ex in &built.sets.weak {
            let WeakLabel::Scalar(p) = ex.weak else {
                panic!()
            };
            assert!(p >= 0.5);
        }
    }

    #[test]
    fn sentiment_jsonl_parses_and_routes() {
        let path = write(
            "cws_sent1",
            "sentences.jsonl",
            r#"{"id":"1","text":"good","label":"positive"}
{"id":"2","text":"so bad","label":"negative"}
{"id":"3","text":"whatever words"}
"#,
        );
        let (records, vocab) = load_sentiment_corpus(&path).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].label, Some(0));
        assert_eq!(records[1].label, Some(1));
        assert_eq!(records[2].label, None);
        assert!(vocab.contains("whatever"));
    }

    #[test]
    fn unknown_label_is_positioned_parse_error() {
        let path = write(
            "cws_sent2",
            "sentences.jsonl",
            "{\"id\":\"1\",\"text\":\"x\",\"label\":\"positive\"}\n{\"id\":\"2\",\"text\":\"y\",\"label\":\"meh\"}\n",
        );
        match load_sentiment_corpus(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn pool_sizes_match_recount_on_fixture() {
        let mut lines = String::new();
        for i in 0..100 {
            if i % 4 == 0 {
                lines.push_str(&format!(
                    "{{\"id\":\"{i}\",\"text\":\"w{i} w{}\"}}\n",
                    i + 1
                ));
            } else {
                let label = ["positive", "negative", "neutral"][i % 3];
                lines.push_str(&format!(
                    "{{\"id\":\"{i}\",\"text\":\"w{i} w{}\",\"label\":\"{label}\"}}\n",
                    i + 1
                ));
            }
        }
        let path = write("cws_sent3", "sentences.jsonl", &lines);
        let (records, _) = load_sentiment_corpus(&path).unwrap();
        let labeled = records.iter().filter(|r| r.label.is_some()).count();
        let unlabeled = records.iter().filter(|r| r.label.is_none()).count();
        assert_eq!(labeled, 75);
        assert_eq!(unlabeled, 25);
    }
}
