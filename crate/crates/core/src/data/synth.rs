//! Synthetic desk-scale task generators.
//!
//! Both generators plant a recoverable signal and hand the annotator a
//! corrupted view of it, so the weak labels are genuinely imperfect: BM25
//! confuses topical documents through background-term collisions and
//! corrupted relevant documents; the released sentiment lexicon has a
//! noise_rate fraction of its entries flipped.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotate::lexicon::{SentimentLexicon, SENTIMENT_CLASSES};
use crate::data::corpus::{RankingCorpus, SentimentRecord};
use crate::data::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::eval::ranked::Qrels;

/// Shape of the synthetic ranking task.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RankingSynthSpec {
    pub vocab_size: usize,
    /// Queries carrying relevance judgments (the full-set and test source).
    pub judged_queries: usize,
    /// Queries without judgments, harvested for the weak set.
    pub unlabeled_queries: usize,
    pub rel_docs_per_query: usize,
    pub nonrel_docs_per_query: usize,
    pub doc_len: usize,
    pub query_len: usize,
    /// Probability that a relevant document loses its topic terms, and that
    /// a non-relevant document picks some up.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for RankingSynthSpec {
    fn default() -> Self {
        Self {
            vocab_size: 300,
            judged_queries: 24,
            unlabeled_queries: 150,
            rel_docs_per_query: 4,
            nonrel_docs_per_query: 4,
            doc_len: 15,
            query_len: 3,
            noise_rate: 0.2,
            seed: 0,
        }
    }
}

impl RankingSynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::Config(format!(
                "noise_rate {} outside [0, 1]",
                self.noise_rate
            )));
        }
        if self.vocab_size < self.query_len * 2 {
            return Err(Error::Config("vocab too small for the query length".into()));
        }
        if self.judged_queries == 0 || self.doc_len == 0 || self.query_len == 0 {
            return Err(Error::Config(
                "synthetic ranking spec needs non-zero shape".into(),
            ));
        }
        Ok(())
    }
}

fn term(i: usize) -> String {
    format!("t{i}")
}

/// Generate a ranking corpus: each query owns a small topic term set;
/// relevant documents devote at least 60% of their tokens to it while
/// non-relevant ones draw from the background. Deterministic per spec.
pub fn gen_synth_ranking(spec: &RankingSynthSpec) -> Result<RankingCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocab_terms: Vec<String> = (0..spec.vocab_size).map(term).collect();

    let mut documents: Vec<(String, Vec<String>)> = Vec::new();
    let mut queries: Vec<(String, Vec<String>)> = Vec::new();
    let mut qrels = Qrels::new();

    let total_queries = spec.judged_queries + spec.unlabeled_queries;
    for q in 0..total_queries {
        let judged = q < spec.judged_queries;
        let query_id = if judged {
            format!("q{q}")
        } else {
            format!("uq{q}")
        };
        // distinct topic terms per query
        let mut topic: Vec<String> = Vec::with_capacity(spec.query_len);
        while topic.len() < spec.query_len {
            let t = vocab_terms
                .choose(&mut rng)
                .expect("vocab non-empty")
                .clone();
            if !topic.contains(&t) {
                topic.push(t);
            }
        }
        queries.push((query_id.clone(), topic.clone()));

        let topic_quota = (spec.doc_len * 3).div_ceil(5); // >= 60% of tokens
        for d in 0..spec.rel_docs_per_query {
            let doc_id = format!("{query_id}-rel{d}");
            let corrupted = rng.random::<f64>() < spec.noise_rate;
            let mut tokens = Vec::with_capacity(spec.doc_len);
            for pos in 0..spec.doc_len {
                if !corrupted && pos < topic_quota {
                    tokens.push(topic.choose(&mut rng).expect("topic non-empty").clone());
                } else {
                    tokens.push(vocab_terms.choose(&mut rng).expect("vocab").clone());
                }
            }
            documents.push((doc_id.clone(), tokens));
            if judged {
                qrels.insert(&query_id, &doc_id, 1);
            }
        }
        for d in 0..spec.nonrel_docs_per_query {
            let doc_id = format!("{query_id}-non{d}");
            let contaminated = rng.random::<f64>() < spec.noise_rate;
            let mut tokens = Vec::with_capacity(spec.doc_len);
            for pos in 0..spec.doc_len {
                if contaminated && pos < 2 {
                    tokens.push(topic.choose(&mut rng).expect("topic").clone());
                } else {
                    tokens.push(vocab_terms.choose(&mut rng).expect("vocab").clone());
                }
            }
            documents.push((doc_id.clone(), tokens));
            if judged {
                qrels.insert(&query_id, &doc_id, 0);
            }
        }
    }

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

/// Shape of the synthetic sentiment task.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SentimentSynthSpec {
    pub vocab_size: usize,
    /// Class-indicative terms per polar class.
    pub polar_terms_per_class: usize,
    /// Neutral-indicative lexicon terms.
    pub neutral_terms: usize,
    pub labeled_sentences: usize,
    pub unlabeled_sentences: usize,
    pub sentence_len: usize,
    /// Probability mass a polar lexicon entry puts on its own class; the
    /// sharper the entries, the crisper the weak labels and confidence
    /// targets.
    pub polar_mass: f64,
    /// Fraction of released-lexicon entries corrupted.
    pub noise_rate: f64,
    /// Corrupt by swapping positive and negative mass (adversarial) instead
    /// of randomizing the entry.
    pub adversarial_flip: bool,
    /// Width of the emitted pretrained embedding vectors.
    pub embedding_dim: usize,
    pub seed: u64,
}

impl Default for SentimentSynthSpec {
    fn default() -> Self {
        Self {
            vocab_size: 400,
            polar_terms_per_class: 40,
            neutral_terms: 40,
            labeled_sentences: 700,
            unlabeled_sentences: 20_000,
            sentence_len: 10,
            polar_mass: 0.95,
            noise_rate: 0.3,
            adversarial_flip: true,
            embedding_dim: 32,
            seed: 0,
        }
    }
}

impl SentimentSynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::Config(format!(
                "noise_rate {} outside [0, 1]",
                self.noise_rate
            )));
        }
        if self.vocab_size < 2 * self.polar_terms_per_class + self.neutral_terms {
            return Err(Error::Config(
                "vocab too small for the lexicon terms".into(),
            ));
        }
        if self.sentence_len == 0 || self.labeled_sentences == 0 {
            return Err(Error::Config(
                "synthetic sentiment spec needs non-zero shape".into(),
            ));
        }
        if !(0.4..1.0).contains(&self.polar_mass) {
            return Err(Error::Config(format!(
                "polar_mass {} outside [0.4, 1)",
                self.polar_mass
            )));
        }
        Ok(())
    }
}

/// A generated sentiment task.
#[derive(Debug, Clone)]
pub struct SynthSentiment {
    /// Records with gold labels (split into the full set and test set).
    pub labeled: Vec<SentimentRecord>,
    /// Records for the weak pool.
    pub unlabeled: Vec<SentimentRecord>,
    /// The corrupted lexicon handed to the annotator.
    pub released_lexicon: SentimentLexicon,
    /// The clean lexicon that defines the ground truth.
    pub hidden_lexicon: SentimentLexicon,
    /// Stand-in for pretrained word vectors: class-clustered with noise, the
    /// structure distributional training would recover from a large corpus.
    pub pretrained: std::collections::HashMap<String, Vec<f64>>,
    pub vocab: Vocabulary,
}

fn normalized_jitter<R: Rng>(rng: &mut R, base: [f64; 3]) -> [f64; 3] {
    let mut d = base;
    for v in &mut d {
        *v *= 1.0 + rng.random_range(-0.15..0.15);
    }
    let sum: f64 = d.iter().sum();
    for v in &mut d {
        *v /= sum;
    }
    d
}

/// Generate sentences over a hidden class-indicative lexicon. The true label
/// of a sentence is the argmax of the hidden-lexicon average over its
/// tokens; the released lexicon is a copy with a noise_rate fraction of
/// entries corrupted, so annotating with it is genuinely weak.
pub fn gen_synth_sentiment(spec: &SentimentSynthSpec) -> Result<SynthSentiment> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut hidden = SentimentLexicon::new();
    let mut released = SentimentLexicon::new();
    let mut polar: [Vec<String>; 2] = [Vec::new(), Vec::new()];
    let mut neutral: Vec<String> = Vec::new();

    let mut next_term = 0usize;
    #[allow(clippy::needless_range_loop)]
    for class in 0..2 {
        for _ in 0..spec.polar_terms_per_class {
            let t = term(next_term);
            next_term += 1;
            let off = 1.0 - spec.polar_mass;
            let base = if class == 0 {
                [spec.polar_mass, off * 0.4, off * 0.6]
            } else {
                [off * 0.4, spec.polar_mass, off * 0.6]
            };
            let dist = normalized_jitter(&mut rng, base);
            hidden.insert(t.clone(), dist)?;
            let corrupted = rng.random::<f64>() < spec.noise_rate;
            let released_dist = if !corrupted {
                dist
            } else if spec.adversarial_flip {
                [dist[1], dist[0], dist[2]]
            } else {
                let raw = [
                    rng.random_range(0.05..1.0),
                    rng.random_range(0.05..1.0),
                    rng.random_range(0.05..1.0),
                ];
                let sum: f64 = raw.iter().sum();
                [raw[0] / sum, raw[1] / sum, raw[2] / sum]
            };
            released.insert(t.clone(), released_dist)?;
            polar[class].push(t);
        }
    }
    for _ in 0..spec.neutral_terms {
        let t = term(next_term);
        next_term += 1;
        let dist = normalized_jitter(&mut rng, [0.10, 0.10, 0.80]);
        hidden.insert(t.clone(), dist)?;
        // flipping a neutral entry swaps its small polar masses only
        let corrupted = rng.random::<f64>() < spec.noise_rate;
        let released_dist = if corrupted && spec.adversarial_flip {
            [dist[1], dist[0], dist[2]]
        } else {
            dist
        };
        released.insert(t.clone(), released_dist)?;
        neutral.push(t);
    }
    let background: Vec<String> = (next_term..spec.vocab_size).map(term).collect();

    let make_sentence = |rng: &mut ChaCha8Rng, prefix: &str, i: usize| -> SentimentRecord {
        let class = rng.random_range(0..SENTIMENT_CLASSES);
        let polar_quota = (spec.sentence_len * 3).div_ceil(10).max(1);
        let mut tokens = Vec::with_capacity(spec.sentence_len);
        for pos in 0..spec.sentence_len {
            let tok = if pos < polar_quota {
                match class {
                    0 | 1 => polar[class].choose(rng).expect("polar terms").clone(),
                    _ => neutral.choose(rng).expect("neutral terms").clone(),
                }
            } else {
                background.choose(rng).expect("background terms").clone()
            };
            tokens.push(tok);
        }
        // ground truth from the hidden lexicon, not the sampled class
        let truth = match crate::annotate::lexicon::lexicon_annotate(&hidden, &tokens) {
            crate::annotate::labels::WeakLabel::Distribution(d) => {
                let mut best = 0;
                for (k, &v) in d.iter().enumerate() {
                    if v > d[best] {
                        best = k;
                    }
                }
                best
            }
            _ => unreachable!(),
        };
        SentimentRecord {
            id: format!("{prefix}{i}"),
            tokens,
            label: Some(truth),
        }
    };

    let labeled: Vec<SentimentRecord> = (0..spec.labeled_sentences)
        .map(|i| make_sentence(&mut rng, "s", i))
        .collect();
    let mut unlabeled: Vec<SentimentRecord> = (0..spec.unlabeled_sentences)
        .map(|i| make_sentence(&mut rng, "u", i))
        .collect();
    // the weak pool does not expose gold labels
    for r in &mut unlabeled {
        r.label = None;
    }

    let vocab = Vocabulary::build(
        labeled
            .iter()
            .map(|r| r.tokens.as_slice())
            .chain(unlabeled.iter().map(|r| r.tokens.as_slice())),
    );

    // pretrained vectors: a shared direction per class plus term noise
    let m = spec.embedding_dim;
    let mut directions: Vec<Vec<f64>> = Vec::with_capacity(SENTIMENT_CLASSES);
    for _ in 0..SENTIMENT_CLASSES {
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        directions.push(v.iter().map(|x| x / norm).collect());
    }
    let mut pretrained = std::collections::HashMap::new();
    let mut embed = |rng: &mut ChaCha8Rng, term: &str, class: Option<usize>| {
        let mut v: Vec<f64> = (0..m).map(|_| rng.random_range(-0.15..0.15)).collect();
        if let Some(c) = class {
            for (x, d) in v.iter_mut().zip(&directions[c]) {
                *x += 0.3 * d;
            }
        }
        pretrained.insert(term.to_string(), v);
    };
    for (class, terms) in polar.iter().enumerate() {
        for t in terms {
            embed(&mut rng, t, Some(class));
        }
    }
    for t in &neutral {
        embed(&mut rng, t, Some(2));
    }
    for t in &background {
        embed(&mut rng, t, None);
    }

    Ok(SynthSentiment {
        labeled,
        unlabeled,
        released_lexicon: released,
        hidden_lexicon: hidden,
        pretrained,
        vocab,
    })
}
