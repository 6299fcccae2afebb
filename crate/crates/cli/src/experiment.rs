//! The experiment grid: every (strategy, seed) cell is trained, evaluated,
//! and persisted; strategies are compared against a baseline with paired
//! t-tests under Bonferroni correction.

use std::fmt::Write as _;
use std::path::Path;

use cws_core::data::write_curves_csv;
use cws_core::eval::{paired_t_test, write_run_file};
use cws_core::model::ModelParameters;
use cws_core::train::{run_strategy, ModelSpec, Predictor, Strategy, TrainOutcome};
use cws_core::{Error, Result};

use crate::manifest::{build_config, build_dims, ExperimentManifest};
use crate::tasks::{
    build_task, ranking_annotator_runs, ranking_metrics, ranking_model_runs,
    sentiment_annotator_f1, sentiment_model_f1, TaskBundle,
};

/// One metric row of the results table.
#[derive(Debug, Clone)]
pub struct MetricRow {
    pub strategy: String,
    /// Seed as text; the aggregate rows use "mean".
    pub seed: String,
    pub metric: String,
    /// Formatted value; failed cells carry "failed".
    pub value: String,
}

/// One significance row.
#[derive(Debug, Clone)]
pub struct SignificanceRow {
    pub strategy: String,
    pub baseline: String,
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

/// Everything an experiment produced.
pub struct ExperimentReport {
    pub metrics: Vec<MetricRow>,
    pub significance: Vec<SignificanceRow>,
    /// (strategy, seed) cells that failed, with the error text.
    pub failures: Vec<(String, u64, String)>,
}

impl ExperimentReport {
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("strategy,seed,metric,value\n");
        for row in &self.metrics {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                row.strategy, row.seed, row.metric, row.value
            );
        }
        out
    }

    pub fn significance_csv(&self) -> String {
        let mut out = String::from("strategy,baseline,t,p,bonferroni_significant\n");
        for row in &self.significance {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{}",
                row.strategy, row.baseline, row.t, row.p, row.significant
            );
        }
        out
    }

    /// Mean value of the primary metric for a strategy, if every seed ran.
    pub fn mean_of(&self, strategy: &str, metric: &str) -> Option<f64> {
        self.metrics
            .iter()
            .find(|r| r.strategy == strategy && r.seed == "mean" && r.metric == metric)
            .and_then(|r| r.value.parse().ok())
    }
}

/// Per-seed values of one metric.
type SeedValues = Vec<(u64, f64)>;
/// Collected metrics of one strategy: (metric name, per-seed values).
type StrategyMetrics = Vec<(String, SeedValues)>;

/// The primary metric name per task.
fn primary_metric(task: cws_core::model::Task) -> &'static str {
    match task {
        cws_core::model::Task::Ranking => "map",
        cws_core::model::Task::Sentiment => "macro_f1",
    }
}

struct CellOutcome {
    metrics: Vec<(String, f64)>,
    outcome: TrainOutcome,
    runs: Option<Vec<cws_core::eval::RankedList>>,
}

fn run_cell(
    bundle: &TaskBundle,
    dims: &cws_core::model::NetworkDims,
    manifest: &ExperimentManifest,
    strategy: Strategy,
    seed: u64,
) -> Result<CellOutcome> {
    let config = build_config(bundle.task(), strategy, seed, &manifest.config);
    match bundle {
        TaskBundle::Sentiment(task) => {
            let spec = ModelSpec {
                task: cws_core::model::Task::Sentiment,
                dims: dims.clone(),
                vocab: &task.vocab,
                pretrained: task.pretrained.as_ref(),
                idf: None,
            };
            let eval_fn = |params: &ModelParameters| -> f64 {
                sentiment_model_f1(params, task).unwrap_or(f64::NAN)
            };
            let result = run_strategy(&spec, &task.sets, &config, Some(&eval_fn))?;
            let f1 = match &result.predictor {
                Predictor::Model(params) => sentiment_model_f1(params, task)?,
                Predictor::WeakAnnotator => sentiment_annotator_f1(task)?,
            };
            Ok(CellOutcome {
                metrics: vec![("macro_f1".to_string(), f1)],
                outcome: result.outcome,
                runs: None,
            })
        }
        TaskBundle::Ranking(task) => {
            let spec = ModelSpec {
                task: cws_core::model::Task::Ranking,
                dims: dims.clone(),
                vocab: &task.vocab,
                pretrained: None,
                idf: Some(&task.idf),
            };
            let eval_fn = |params: &ModelParameters| -> f64 {
                ranking_model_runs(params, task)
                    .and_then(|runs| ranking_metrics(&runs, &task.qrels))
                    .map(|(map, _)| map)
                    .unwrap_or(f64::NAN)
            };
            let result = run_strategy(&spec, &task.sets, &config, Some(&eval_fn))?;
            let runs = match &result.predictor {
                Predictor::Model(params) => ranking_model_runs(params, task)?,
                Predictor::WeakAnnotator => ranking_annotator_runs(task)?,
            };
            let (map, ndcg) = ranking_metrics(&runs, &task.qrels)?;
            Ok(CellOutcome {
                metrics: vec![("map".to_string(), map), ("ndcg@20".to_string(), ndcg)],
                outcome: result.outcome,
                runs: Some(runs),
            })
        }
    }
}

/// Run the whole grid, writing per-cell curves (and run files for ranking)
/// plus `metrics.csv` and `significance.csv` under `out_dir`.
///
/// A failing cell is recorded as `strategy,seed,error,failed` and the grid
/// continues. Identical manifests yield byte-identical outputs.
pub fn run_experiment(manifest: &ExperimentManifest, out_dir: &Path) -> Result<ExperimentReport> {
    manifest.validate()?;
    std::fs::create_dir_all(out_dir)?;

    let strategies: Vec<Strategy> = manifest
        .strategies
        .iter()
        .map(|s| s.parse::<Strategy>())
        .collect::<Result<_>>()?;
    let dims = build_dims(manifest.task, &manifest.dims);
    let bundle = build_task(&manifest.data, &dims, &manifest.split)?;

    let mut report = ExperimentReport {
        metrics: Vec::new(),
        significance: Vec::new(),
        failures: Vec::new(),
    };
    // per strategy, per metric, the per-seed values for aggregation
    let mut collected: Vec<(Strategy, StrategyMetrics)> = Vec::new();

    for &strategy in &strategies {
        let mut per_metric: StrategyMetrics = Vec::new();
        for &seed in &manifest.seeds {
            match run_cell(&bundle, &dims, manifest, strategy, seed) {
                Ok(cell) => {
                    for (metric, value) in &cell.metrics {
                        report.metrics.push(MetricRow {
                            strategy: strategy.name().to_string(),
                            seed: seed.to_string(),
                            metric: metric.clone(),
                            value: format!("{value:.6}"),
                        });
                        match per_metric.iter_mut().find(|(m, _)| m == metric) {
                            Some((_, values)) => values.push((seed, *value)),
                            None => per_metric.push((metric.clone(), vec![(seed, *value)])),
                        }
                    }
                    let curves_path =
                        out_dir.join(format!("curves_{}_{}.csv", strategy.name(), seed));
                    write_curves_csv(&cell.outcome.curves, &curves_path)?;
                    if let Some(runs) = &cell.runs {
                        let run_path =
                            out_dir.join(format!("run_{}_{}.txt", strategy.name(), seed));
                        write_run_file(&run_path, runs, strategy.name())?;
                    }
                }
                Err(e) => {
                    report.metrics.push(MetricRow {
                        strategy: strategy.name().to_string(),
                        seed: seed.to_string(),
                        metric: "error".to_string(),
                        value: "failed".to_string(),
                    });
                    report
                        .failures
                        .push((strategy.name().to_string(), seed, e.to_string()));
                    eprintln!("cell {} seed {seed} failed: {e}", strategy.name());
                }
            }
        }
        // aggregate means in manifest order
        for (metric, values) in &per_metric {
            if values.len() == manifest.seeds.len() {
                let mean = values.iter().map(|(_, v)| v).sum::<f64>() / values.len() as f64;
                report.metrics.push(MetricRow {
                    strategy: strategy.name().to_string(),
                    seed: "mean".to_string(),
                    metric: metric.clone(),
                    value: format!("{mean:.6}"),
                });
            }
        }
        collected.push((strategy, per_metric));
    }

    // paired significance vs the baseline on the primary metric
    let metric = primary_metric(manifest.task);
    let baseline: Strategy = manifest.baseline.parse()?;
    let baseline_values: Option<&SeedValues> = collected
        .iter()
        .find(|(s, _)| *s == baseline)
        .and_then(|(_, pm)| pm.iter().find(|(m, _)| m == metric).map(|(_, v)| v));
    if let Some(base) = baseline_values {
        let comparisons = strategies.iter().filter(|&&s| s != baseline).count().max(1);
        // every listed strategy is compared, the baseline included: identical
        // metric vectors report t = 0, p = 1
        for (strategy, per_metric) in &collected {
            let Some((_, values)) = per_metric.iter().find(|(m, _)| m == metric) else {
                continue;
            };
            // pair by seed
            let pairs: Vec<(f64, f64)> = values
                .iter()
                .filter_map(|(seed, v)| base.iter().find(|(s, _)| s == seed).map(|(_, b)| (*v, *b)))
                .collect();
            if pairs.len() >= 2 {
                let outcome = paired_t_test(&pairs, comparisons)?;
                report.significance.push(SignificanceRow {
                    strategy: strategy.name().to_string(),
                    baseline: baseline.name().to_string(),
                    t: outcome.t,
                    p: outcome.p,
                    significant: outcome.significant,
                });
            }
        }
    }

    std::fs::write(out_dir.join("metrics.csv"), report.metrics_csv())?;
    std::fs::write(out_dir.join("significance.csv"), report.significance_csv())?;
    if !report.failures.is_empty() {
        let mut text = String::new();
        for (s, seed, msg) in &report.failures {
            let _ = writeln!(text, "{s},{seed},{msg}");
        }
        std::fs::write(out_dir.join("failures.csv"), text)?;
    }
    Ok(report)
}

/// Convenience used by `eval` and tests: significance between two metric
/// vectors paired by position.
pub fn compare_runs(a: &[f64], b: &[f64], comparisons: usize) -> Result<(f64, f64, bool)> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "{} vs {} paired values",
            a.len(),
            b.len()
        )));
    }
    let pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    let outcome = paired_t_test(&pairs, comparisons)?;
    Ok((outcome.t, outcome.p, outcome.significant))
}
