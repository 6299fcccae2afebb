//! Shared fixtures for the benchmark targets.

use cws_core::annotate::{build_index, InvertedIndex};
use cws_core::data::{
    gen_synth_ranking, gen_synth_sentiment, RankingSynthSpec, SentimentSynthSpec,
};

/// A mid-sized synthetic ranking corpus and its index.
pub fn ranking_fixture() -> (cws_core::data::RankingCorpus, InvertedIndex) {
    let spec = RankingSynthSpec {
        judged_queries: 12,
        unlabeled_queries: 40,
        ..Default::default()
    };
    let corpus = gen_synth_ranking(&spec).expect("generator");
    let index = build_index(&corpus.documents).expect("index");
    (corpus, index)
}

/// A mid-sized synthetic sentiment task.
pub fn sentiment_fixture() -> cws_core::data::SynthSentiment {
    let spec = SentimentSynthSpec {
        labeled_sentences: 300,
        unlabeled_sentences: 2000,
        ..Default::default()
    };
    gen_synth_sentiment(&spec).expect("generator")
}
