//! Corpus loading, tokenization, vocabulary building, training-set assembly,
//! synthetic task generators, and curve emission.

pub mod corpus;
pub mod curves;
pub mod synth;
pub mod tokenize;
pub mod vocab;

pub use corpus::{
    assemble_sentiment_sets, build_rank_sets, class_index, class_name, load_ranking_corpus,
    load_sentiment_corpus, one_hot, RankSetOptions, RankSets, RankingCorpus, SentimentRecord,
};
pub use curves::{read_curves_csv, write_curves_csv};
pub use synth::{
    gen_synth_ranking, gen_synth_sentiment, RankingSynthSpec, SentimentSynthSpec, SynthSentiment,
};
pub use tokenize::tokenize;
pub use vocab::{Vocabulary, PAD_ID, UNK_ID};
