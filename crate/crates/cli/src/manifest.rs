//! Declarative experiment manifests.
//!
//! A manifest is a single JSON file naming the task, the data (synthetic
//! spec or file paths), the strategies and seeds to run, and any training
//! overrides. Identical manifests produce byte-identical outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cws_core::data::{RankingSynthSpec, SentimentSynthSpec};
use cws_core::model::{NetworkDims, Task};
use cws_core::train::Alternation;
use cws_core::{Error, Result};

/// Where the corpus comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    SyntheticRanking(RankingSynthSpec),
    SyntheticSentiment(SentimentSynthSpec),
    RankingFiles {
        docs: PathBuf,
        queries: PathBuf,
        qrels: PathBuf,
    },
    SentimentFiles {
        sentences: PathBuf,
        lexicon: PathBuf,
        embeddings: Option<PathBuf>,
    },
}

/// Optional overrides applied on top of the task defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigOverrides {
    pub lr: Option<f64>,
    pub batch_weak: Option<usize>,
    pub batch_full: Option<usize>,
    pub ratio_full: Option<usize>,
    pub ratio_weak: Option<usize>,
    pub alternation: Option<Alternation>,
    pub max_weak_batches: Option<usize>,
    pub checkpoint_every: Option<usize>,
    pub dropout: Option<f64>,
    pub l2_weight: Option<f64>,
}

/// How the gold-labeled material is split and evaluated.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitOptions {
    /// Gold sentence records routed to the full set; the rest are test.
    pub full_records: usize,
    /// Judged queries routed to the full set; the rest are test queries.
    pub full_queries: usize,
    /// Tournament pool size for reranking.
    pub pool_size: usize,
    /// Candidates harvested per unlabeled query when building the weak set.
    pub top_k: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self {
            full_records: 200,
            full_queries: 3,
            pool_size: 20,
            top_k: 25,
        }
    }
}

/// The complete description of one experiment grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub task: Task,
    pub data: DataSource,
    /// Strategy names, e.g. "WSO", "CWS_JT".
    pub strategies: Vec<String>,
    pub seeds: Vec<u64>,
    /// Baseline strategy for significance testing (default "WSO").
    #[serde(default = "default_baseline")]
    pub baseline: String,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub config: ConfigOverrides,
    #[serde(default)]
    pub split: SplitOptions,
    #[serde(default)]
    pub dims: Option<NetworkDims>,
}

fn default_baseline() -> String {
    "WSO".to_string()
}

impl ExperimentManifest {
    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::Config("manifest needs at least one strategy".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("manifest needs at least one seed".into()));
        }
        let task_matches = matches!(
            (&self.task, &self.data),
            (Task::Ranking, DataSource::SyntheticRanking(_))
                | (Task::Ranking, DataSource::RankingFiles { .. })
                | (Task::Sentiment, DataSource::SyntheticSentiment(_))
                | (Task::Sentiment, DataSource::SentimentFiles { .. })
        );
        if !task_matches {
            return Err(Error::Config(
                "manifest data source does not match the task".into(),
            ));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let manifest: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: format!("manifest: {e}"),
        })?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// The default synthetic sentiment experiment.
    pub fn default_sentiment() -> Self {
        Self {
            task: Task::Sentiment,
            data: DataSource::SyntheticSentiment(SentimentSynthSpec::default()),
            strategies: vec!["WA".into(), "WSO".into(), "CWS_JT".into()],
            seeds: vec![1, 2, 3, 4, 5],
            baseline: default_baseline(),
            out_dir: None,
            config: ConfigOverrides::default(),
            split: SplitOptions::default(),
            dims: None,
        }
    }

    /// The default synthetic ranking experiment.
    pub fn default_ranking() -> Self {
        Self {
            task: Task::Ranking,
            data: DataSource::SyntheticRanking(RankingSynthSpec::default()),
            strategies: vec!["WA".into(), "WSO".into(), "CWS_JT".into()],
            seeds: vec![1, 2, 3, 4, 5],
            baseline: default_baseline(),
            out_dir: None,
            config: ConfigOverrides::default(),
            split: SplitOptions::default(),
            dims: None,
        }
    }
}

/// Task-default training configuration with the manifest overrides applied.
pub fn build_config(
    task: Task,
    strategy: cws_core::train::Strategy,
    seed: u64,
    overrides: &ConfigOverrides,
) -> cws_core::train::TrainConfig {
    let mut config = cws_core::train::TrainConfig::for_task(task, strategy, seed);
    // desk-scale defaults frozen alongside the synthetic generators
    match task {
        Task::Sentiment => {
            config.lr = 1e-3;
            config.batch_full = 64;
            config.ratio_full = 5;
            config.max_weak_batches = 60;
            config.checkpoint_every = 10;
        }
        Task::Ranking => {
            config.lr = 3e-3;
            config.batch_full = 32;
            config.max_weak_batches = 360;
            config.checkpoint_every = 60;
        }
    }
    if let Some(v) = overrides.lr {
        config.lr = v;
    }
    if let Some(v) = overrides.batch_weak {
        config.batch_weak = v;
    }
    if let Some(v) = overrides.batch_full {
        config.batch_full = v;
    }
    if let Some(v) = overrides.ratio_full {
        config.ratio_full = v;
    }
    if let Some(v) = overrides.ratio_weak {
        config.ratio_weak = v;
    }
    if let Some(v) = overrides.alternation {
        config.alternation = v;
    }
    if let Some(v) = overrides.max_weak_batches {
        config.max_weak_batches = v;
    }
    if let Some(v) = overrides.checkpoint_every {
        config.checkpoint_every = v;
    }
    if let Some(v) = overrides.dropout {
        config.dropout = v;
    }
    if let Some(v) = overrides.l2_weight {
        config.l2_weight = v;
    }
    config
}

/// Task-default network dims (the sentiment default widens the conv bank).
pub fn build_dims(task: Task, dims: &Option<NetworkDims>) -> NetworkDims {
    if let Some(d) = dims {
        return d.clone();
    }
    match task {
        Task::Sentiment => NetworkDims {
            conv_filters: 32,
            ..NetworkDims::default()
        },
        Task::Ranking => NetworkDims::default(),
    }
}
