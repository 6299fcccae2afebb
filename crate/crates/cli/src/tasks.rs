//! Task assembly: turn a data source into training sets, test material, and
//! evaluation functions.

use std::collections::HashMap;

use cws_core::annotate::{
    bm25_rank_all, build_index, lexicon_annotate, Bm25Params, SentimentLexicon, WeakLabel,
};
use cws_core::data::{
    assemble_sentiment_sets, build_rank_sets, gen_synth_ranking, gen_synth_sentiment,
    load_ranking_corpus, load_sentiment_corpus, RankSetOptions, RankingCorpus, SentimentRecord,
    Vocabulary,
};
use cws_core::eval::{
    macro_f1, mean_average_precision, ndcg_at_k, rerank, Qrels, RankedList, SEMEVAL_CLASSES,
};
use cws_core::model::{
    load_pretrained_embeddings, predict, Instance, ModelParameters, NetworkDims, Prediction,
    RankInstance, SentenceInstance, Task,
};
use cws_core::train::LabeledSets;
use cws_core::{Error, Result};

use crate::manifest::{DataSource, SplitOptions};

/// An assembled sentiment task.
pub struct SentimentTask {
    pub sets: LabeledSets,
    pub test: Vec<(SentenceInstance, usize)>,
    pub gold: Vec<usize>,
    /// Annotator argmax per test record.
    pub annotator_predictions: Vec<usize>,
    pub vocab: Vocabulary,
    pub pretrained: Option<HashMap<String, Vec<f64>>>,
}

/// One test query with its annotator-ordered candidate pool.
pub struct TestQuery {
    pub query_id: String,
    pub query: Vec<u32>,
    pub candidates: Vec<(String, Vec<u32>)>,
}

/// An assembled ranking task.
pub struct RankingTask {
    pub sets: LabeledSets,
    pub test_queries: Vec<TestQuery>,
    pub qrels: Qrels,
    pub vocab: Vocabulary,
    pub idf: Vec<f64>,
    pub pool_size: usize,
}

pub enum TaskBundle {
    Sentiment(Box<SentimentTask>),
    Ranking(Box<RankingTask>),
}

impl TaskBundle {
    pub fn task(&self) -> Task {
        match self {
            TaskBundle::Sentiment(_) => Task::Sentiment,
            TaskBundle::Ranking(_) => Task::Ranking,
        }
    }

    pub fn sets(&self) -> &LabeledSets {
        match self {
            TaskBundle::Sentiment(t) => &t.sets,
            TaskBundle::Ranking(t) => &t.sets,
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        match self {
            TaskBundle::Sentiment(t) => &t.vocab,
            TaskBundle::Ranking(t) => &t.vocab,
        }
    }
}

fn argmax(dist: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in dist.iter().enumerate() {
        if v > dist[best] {
            best = i;
        }
    }
    best
}

/// Assemble the sentiment task from gold/unlabeled records and a lexicon.
pub fn assemble_sentiment_task(
    records: Vec<SentimentRecord>,
    lexicon: SentimentLexicon,
    vocab: Vocabulary,
    pretrained: Option<HashMap<String, Vec<f64>>>,
    dims: &NetworkDims,
    split: &SplitOptions,
) -> Result<SentimentTask> {
    let (gold_records, unlabeled): (Vec<_>, Vec<_>) =
        records.into_iter().partition(|r| r.label.is_some());
    if gold_records.len() <= split.full_records {
        return Err(Error::Config(format!(
            "{} gold records cannot cover a full set of {} plus a test split",
            gold_records.len(),
            split.full_records
        )));
    }
    let (full_records, test_records) = gold_records.split_at(split.full_records);
    let sets =
        assemble_sentiment_sets(full_records, &unlabeled, &lexicon, &vocab, dims.conv_window)?;

    let mut test = Vec::with_capacity(test_records.len());
    let mut gold = Vec::new();
    let mut annotator_predictions = Vec::new();
    for record in test_records {
        if record.tokens.is_empty() {
            continue;
        }
        let instance = SentenceInstance::padded(vocab.encode(&record.tokens), dims.conv_window)?;
        let WeakLabel::Distribution(weak) = lexicon_annotate(&lexicon, &record.tokens) else {
            unreachable!()
        };
        annotator_predictions.push(argmax(&weak));
        gold.push(record.label.expect("gold record"));
        test.push((instance, record.label.expect("gold record")));
    }
    if test.is_empty() {
        return Err(Error::DegenerateInput("no usable test records".into()));
    }
    Ok(SentimentTask {
        sets,
        test,
        gold,
        annotator_predictions,
        vocab,
        pretrained,
    })
}

/// Assemble the ranking task: judged queries split into full-set sources and
/// test queries, unlabeled queries harvested into the weak set.
pub fn assemble_ranking_task(corpus: RankingCorpus, split: &SplitOptions) -> Result<RankingTask> {
    let index = build_index(&corpus.documents)?;
    let judged: Vec<String> = corpus
        .queries
        .iter()
        .filter(|(q, _)| !corpus.qrels.grades_for(q).is_empty())
        .map(|(q, _)| q.clone())
        .collect();
    if judged.len() <= split.full_queries {
        return Err(Error::Config(format!(
            "{} judged queries cannot cover a full split of {} plus test queries",
            judged.len(),
            split.full_queries
        )));
    }
    let (_, test_ids) = judged.split_at(split.full_queries);
    let test_set: std::collections::HashSet<&str> = test_ids.iter().map(String::as_str).collect();

    // sets are built without the test queries
    let mut sets_corpus = corpus.clone();
    sets_corpus
        .queries
        .retain(|(q, _)| !test_set.contains(q.as_str()));
    let options = RankSetOptions {
        top_k: split.top_k,
        bm25: Bm25Params::default(),
    };
    let built = build_rank_sets(&sets_corpus, &index, &options)?;

    let doc_tokens: HashMap<&str, &Vec<String>> = corpus
        .documents
        .iter()
        .map(|(d, t)| (d.as_str(), t))
        .collect();
    let mut test_queries = Vec::new();
    for (qid, qtoks) in corpus
        .queries
        .iter()
        .filter(|(q, _)| test_set.contains(q.as_str()))
    {
        let ranked = bm25_rank_all(&index, &options.bm25, qtoks)?;
        let candidates: Vec<(String, Vec<u32>)> = ranked
            .into_iter()
            .filter(|(_, s)| *s > 0.0)
            .take(split.top_k)
            .map(|(d, _)| {
                let toks = corpus.vocab.encode(doc_tokens[d.as_str()]);
                (d, toks)
            })
            .collect();
        if candidates.is_empty() {
            continue;
        }
        test_queries.push(TestQuery {
            query_id: qid.clone(),
            query: corpus.vocab.encode(qtoks),
            candidates,
        });
    }
    if test_queries.is_empty() {
        return Err(Error::DegenerateInput("no evaluable test queries".into()));
    }
    let idf: Vec<f64> = corpus.vocab.terms().map(|t| index.idf(t)).collect();
    Ok(RankingTask {
        sets: built.sets,
        test_queries,
        qrels: corpus.qrels,
        vocab: corpus.vocab,
        idf,
        pool_size: split.pool_size,
    })
}

/// Build a task bundle from a manifest data source.
pub fn build_task(
    source: &DataSource,
    dims: &NetworkDims,
    split: &SplitOptions,
) -> Result<TaskBundle> {
    match source {
        DataSource::SyntheticSentiment(spec) => {
            let synth = gen_synth_sentiment(spec)?;
            let mut records = synth.labeled;
            records.extend(synth.unlabeled);
            let task = assemble_sentiment_task(
                records,
                synth.released_lexicon,
                synth.vocab,
                Some(synth.pretrained),
                dims,
                split,
            )?;
            Ok(TaskBundle::Sentiment(Box::new(task)))
        }
        DataSource::SentimentFiles {
            sentences,
            lexicon,
            embeddings,
        } => {
            let (records, vocab) = load_sentiment_corpus(sentences)?;
            let lexicon = SentimentLexicon::load_tsv(lexicon)?;
            let pretrained = embeddings
                .as_ref()
                .map(|p| load_pretrained_embeddings(p))
                .transpose()?;
            let task = assemble_sentiment_task(records, lexicon, vocab, pretrained, dims, split)?;
            Ok(TaskBundle::Sentiment(Box::new(task)))
        }
        DataSource::SyntheticRanking(spec) => {
            let corpus = gen_synth_ranking(spec)?;
            Ok(TaskBundle::Ranking(Box::new(assemble_ranking_task(
                corpus, split,
            )?)))
        }
        DataSource::RankingFiles {
            docs,
            queries,
            qrels,
        } => {
            let corpus = load_ranking_corpus(docs, queries, qrels)?;
            Ok(TaskBundle::Ranking(Box::new(assemble_ranking_task(
                corpus, split,
            )?)))
        }
    }
}

/// Macro-F1 of a trained model over the sentiment test split.
pub fn sentiment_model_f1(params: &ModelParameters, task: &SentimentTask) -> Result<f64> {
    let predictions: Vec<usize> = task
        .test
        .iter()
        .map(|(inst, _)| Ok(predict(params, &Instance::Sentence(inst.clone()))?.argmax()))
        .collect::<Result<_>>()?;
    macro_f1(&predictions, &task.gold, &SEMEVAL_CLASSES)
}

/// Macro-F1 of the weak annotator over the sentiment test split.
pub fn sentiment_annotator_f1(task: &SentimentTask) -> Result<f64> {
    macro_f1(&task.annotator_predictions, &task.gold, &SEMEVAL_CLASSES)
}

/// Tournament-rerank every test query with a trained pairwise model.
pub fn ranking_model_runs(params: &ModelParameters, task: &RankingTask) -> Result<Vec<RankedList>> {
    let scorer = |query: &[u32], a: &[u32], b: &[u32]| -> Result<f64> {
        let instance = RankInstance::new(query.to_vec(), a.to_vec(), b.to_vec())?;
        match predict(params, &Instance::Rank(instance))? {
            Prediction::Probability(p) => Ok(p),
            Prediction::Distribution(_) => {
                Err(Error::State("ranking model emitted a distribution".into()))
            }
        }
    };
    task.test_queries
        .iter()
        .map(|tq| {
            rerank(
                &scorer,
                &tq.query_id,
                &tq.query,
                &tq.candidates,
                task.pool_size,
            )
        })
        .collect()
}

/// The annotator's own candidate ordering as ranked runs.
pub fn ranking_annotator_runs(task: &RankingTask) -> Result<Vec<RankedList>> {
    task.test_queries
        .iter()
        .map(|tq| {
            let scored: Vec<(String, f64)> = tq
                .candidates
                .iter()
                .enumerate()
                .map(|(i, (d, _))| (d.clone(), (tq.candidates.len() - i) as f64))
                .collect();
            RankedList::from_scores(tq.query_id.clone(), scored)
        })
        .collect()
}

/// (MAP, nDCG@20) for a set of runs against the task qrels.
pub fn ranking_metrics(runs: &[RankedList], qrels: &Qrels) -> Result<(f64, f64)> {
    Ok((
        mean_average_precision(runs, qrels, 1000)?,
        ndcg_at_k(runs, qrels, 20)?,
    ))
}
