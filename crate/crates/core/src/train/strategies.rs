//! Dispatch of every training strategy to its phase sequence.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Vocabulary;
use crate::error::{Error, Result};
use crate::model::{init_parameters, ModelParameters, NetworkDims, Task};
use crate::train::config::{Strategy, TrainConfig};
use crate::train::engine::{train, EvalFn, FullPhase, TrainOutcome};
use crate::train::nli::NliGenerator;
use crate::train::sampler::sample_full_batch;
use crate::train::sets::{FullExample, LabeledSets};
use crate::train::steps::{full_step, true_label_step, ConfidenceSource};

/// Everything needed to build a fresh model.
#[derive(Clone)]
pub struct ModelSpec<'a> {
    pub task: Task,
    pub dims: NetworkDims,
    pub vocab: &'a Vocabulary,
    pub pretrained: Option<&'a HashMap<String, Vec<f64>>>,
    pub idf: Option<&'a [f64]>,
}

impl ModelSpec<'_> {
    pub fn build(&self, seed: u64) -> Result<ModelParameters> {
        init_parameters(
            self.task,
            &self.dims,
            self.vocab,
            seed,
            self.pretrained,
            self.idf,
        )
    }
}

/// What a strategy produces for evaluation: a trained model, or the weak
/// annotator itself.
pub enum Predictor {
    Model(Box<ModelParameters>),
    WeakAnnotator,
}

/// A strategy run: the predictor plus the step reports and curve records of
/// every training phase.
pub struct StrategyOutcome {
    pub predictor: Predictor,
    pub outcome: TrainOutcome,
}

/// Distinct deterministic seed per training phase.
pub fn phase_seed(seed: u64, phase: u64) -> u64 {
    seed ^ phase.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Weak batches one pass will actually run: one shuffled epoch, capped.
pub fn planned_weak_batches(weak_len: usize, config: &TrainConfig) -> usize {
    weak_len
        .div_ceil(config.batch_weak)
        .min(config.max_weak_batches)
}

/// Step budget for phases that train on the full set alone (fine-tuning,
/// confidence pretraining, the label generator): the number of full steps
/// the alternating schedule would interleave into one weak pass.
pub fn full_phase_steps(weak_len: usize, config: &TrainConfig) -> usize {
    (planned_weak_batches(weak_len, config) / config.ratio_weak).max(1) * config.ratio_full
}

/// Plain supervised loop on the full set with true labels, with optional
/// group freezes.
#[allow(clippy::too_many_arguments)]
fn finetune_on_full(
    params: &mut ModelParameters,
    sets: &LabeledSets,
    config: &TrainConfig,
    steps: usize,
    update_representation: bool,
    update_supervision: bool,
    stream_seed: u64,
    outcome: &mut TrainOutcome,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
    for step in 0..steps {
        let indices = sample_full_batch(sets.full.len(), config.batch_full, &mut rng)?;
        let batch: Vec<&FullExample> = indices.iter().map(|&i| &sets.full[i]).collect();
        let report = true_label_step(
            params,
            &batch,
            config,
            update_representation,
            update_supervision,
            &mut rng,
            step + 1,
        )?;
        outcome.reports.push(report);
    }
    Ok(())
}

/// Confidence-loss loop on the full set (the standalone and circular
/// pretraining phases).
fn pretrain_confidence(
    params: &mut ModelParameters,
    sets: &LabeledSets,
    config: &TrainConfig,
    steps: usize,
    stream_seed: u64,
    outcome: &mut TrainOutcome,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
    for step in 0..steps {
        let indices = sample_full_batch(sets.full.len(), config.batch_full, &mut rng)?;
        let batch: Vec<&FullExample> = indices.iter().map(|&i| &sets.full[i]).collect();
        let report = full_step(params, &batch, config, false, &mut rng, step + 1)?;
        outcome.reports.push(report);
    }
    Ok(())
}

fn config_with_seed(config: &TrainConfig, seed: u64) -> TrainConfig {
    let mut c = config.clone();
    c.seed = seed;
    c
}

/// Offset curve records of a later phase so weak-batch counters continue.
fn append_offset(outcome: &mut TrainOutcome, mut phase: TrainOutcome, offset: usize) {
    for c in &mut phase.curves {
        c.weak_batch += offset;
    }
    outcome.reports.extend(phase.reports);
    outcome.curves.extend(phase.curves);
}

/// Run one strategy end to end and return its predictor.
///
/// Every phase draws from its own deterministic random stream derived from
/// `config.seed`, so a (strategy, config, seed, data) quadruple reproduces
/// bit-identical parameters.
pub fn run_strategy(
    spec: &ModelSpec,
    sets: &LabeledSets,
    config: &TrainConfig,
    eval_fn: Option<&EvalFn>,
) -> Result<StrategyOutcome> {
    config.validate()?;
    let strategy = config.strategy;
    if strategy.uses_full_set() && sets.full.is_empty() {
        return Err(Error::Config(format!(
            "{strategy} requires a non-empty full set"
        )));
    }
    if strategy.uses_weak_set() && sets.weak.is_empty() {
        return Err(Error::Config(format!(
            "{strategy} requires a non-empty weak set"
        )));
    }

    let seed = config.seed;
    let mut outcome = TrainOutcome::default();

    let predictor = match strategy {
        Strategy::Wa => Predictor::WeakAnnotator,

        Strategy::Wso => {
            let mut params = spec.build(seed)?;
            outcome = train(
                &mut params,
                sets,
                config,
                &ConfidenceSource::Unit,
                FullPhase::None,
                eval_fn,
            )?;
            Predictor::Model(Box::new(params))
        }

        Strategy::Fso => {
            let mut params = spec.build(seed)?;
            finetune_on_full(
                &mut params,
                sets,
                config,
                config.max_weak_batches,
                true,
                true,
                phase_seed(seed, 1),
                &mut outcome,
            )?;
            Predictor::Model(Box::new(params))
        }

        Strategy::WsFt | Strategy::WsSft | Strategy::WsRft => {
            let mut params = spec.build(seed)?;
            outcome = train(
                &mut params,
                sets,
                config,
                &ConfidenceSource::Unit,
                FullPhase::None,
                eval_fn,
            )?;
            let steps = full_phase_steps(sets.weak.len(), config);
            let (update_rep, update_sup) = match strategy {
                Strategy::WsFt => (true, true),
                Strategy::WsSft => (false, true),
                Strategy::WsRft => (true, false),
                _ => unreachable!(),
            };
            finetune_on_full(
                &mut params,
                sets,
                config,
                steps,
                update_rep,
                update_sup,
                phase_seed(seed, 2),
                &mut outcome,
            )?;
            Predictor::Model(Box::new(params))
        }

        Strategy::Nli => {
            let generator_params = spec.build(phase_seed(seed, 1))?;
            let mut generator = NliGenerator::new(
                generator_params,
                &spec.dims.confidence_hidden,
                phase_seed(seed, 2),
            );
            let generator_config = config_with_seed(config, phase_seed(seed, 3));
            generator.train(
                sets,
                &generator_config,
                full_phase_steps(sets.weak.len(), config),
            )?;
            let relabeled = LabeledSets {
                weak: generator.generate(&sets.weak)?,
                full: sets.full.clone(),
            };

            let mut params = spec.build(seed)?;
            outcome = train(
                &mut params,
                &relabeled,
                config,
                &ConfidenceSource::Unit,
                FullPhase::None,
                eval_fn,
            )?;
            Predictor::Model(Box::new(params))
        }

        Strategy::CwsJt | Strategy::CwsJtPlus => {
            let mut params = spec.build(seed)?;
            let full_phase = FullPhase::Confidence {
                with_true_label_update: strategy == Strategy::CwsJtPlus,
            };
            outcome = train(
                &mut params,
                sets,
                config,
                &ConfidenceSource::Shared,
                full_phase,
                eval_fn,
            )?;
            Predictor::Model(Box::new(params))
        }

        Strategy::CwsSt => {
            // confidence network trained alone on its own representation copy
            let mut confidence_net = spec.build(phase_seed(seed, 1))?;
            pretrain_confidence(
                &mut confidence_net,
                sets,
                config,
                full_phase_steps(sets.weak.len(), config),
                phase_seed(seed, 2),
                &mut outcome,
            )?;
            let mut params = spec.build(seed)?;
            let phase = train(
                &mut params,
                sets,
                config,
                &ConfidenceSource::External(&confidence_net),
                FullPhase::None,
                eval_fn,
            )?;
            outcome.reports.extend(phase.reports);
            outcome.curves.extend(phase.curves);
            Predictor::Model(Box::new(params))
        }

        Strategy::CwsCt => {
            let mut params = spec.build(seed)?;
            // round one: plain weak training
            outcome = train(
                &mut params,
                sets,
                config,
                &ConfidenceSource::Unit,
                FullPhase::None,
                None,
            )?;
            let first_pass = planned_weak_batches(sets.weak.len(), config);
            // confidence training on the now-shared representation
            pretrain_confidence(
                &mut params,
                sets,
                config,
                full_phase_steps(sets.weak.len(), config),
                phase_seed(seed, 2),
                &mut outcome,
            )?;
            // round two: weighted weak training over a fresh shuffle
            let second = train(
                &mut params,
                sets,
                &config_with_seed(config, phase_seed(seed, 3)),
                &ConfidenceSource::Shared,
                FullPhase::None,
                eval_fn,
            )?;
            append_offset(&mut outcome, second, first_pass);
            Predictor::Model(Box::new(params))
        }
    };

    Ok(StrategyOutcome { predictor, outcome })
}
