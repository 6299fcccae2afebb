//! The alternating training loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::ModelParameters;
use crate::train::config::{Alternation, TrainConfig};
use crate::train::sampler::{sample_full_batch, EpochSampler};
use crate::train::sets::{CurveRecord, FullExample, LabeledSets, StepMode, TrainStepReport};
use crate::train::steps::{full_step, weak_step, ConfidenceSource};

/// Whether the loop interleaves confidence-loss full steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullPhase {
    /// Weak-only training.
    None,
    /// Alternate full steps minimizing the confidence loss; optionally also
    /// apply the true-label task loss to representation and supervision.
    Confidence { with_true_label_update: bool },
}

/// Metric closure evaluated at checkpoints.
pub type EvalFn<'a> = dyn Fn(&ModelParameters) -> f64 + 'a;

/// Everything a training run produced besides the updated parameters.
#[derive(Debug, Clone, Default)]
pub struct TrainOutcome {
    pub reports: Vec<TrainStepReport>,
    pub curves: Vec<CurveRecord>,
}

#[derive(Default)]
struct Window {
    weighted: f64,
    unweighted: f64,
    weak_steps: usize,
    confidence_loss: f64,
    full_steps: usize,
}

impl Window {
    fn absorb(&mut self, report: &TrainStepReport) {
        match report.mode {
            StepMode::Weak => {
                self.weighted += report.loss;
                self.unweighted += report.loss_unweighted.unwrap_or(report.loss);
                self.weak_steps += 1;
            }
            StepMode::Full => {
                self.confidence_loss += report.loss;
                self.full_steps += 1;
            }
        }
    }

    fn flush(&mut self, weak_batch: usize, curves: &mut Vec<CurveRecord>) {
        if self.weak_steps > 0 || self.full_steps > 0 {
            curves.push(CurveRecord {
                weak_batch,
                split: "train".to_string(),
                loss_t: (self.weak_steps > 0).then(|| self.weighted / self.weak_steps as f64),
                loss_c: (self.full_steps > 0)
                    .then(|| self.confidence_loss / self.full_steps as f64),
                loss_wso: (self.weak_steps > 0).then(|| self.unweighted / self.weak_steps as f64),
                metric_test: None,
            });
        }
        *self = Window::default();
    }
}

fn push_test_record(
    weak_batch: usize,
    params: &ModelParameters,
    eval_fn: Option<&EvalFn>,
    curves: &mut Vec<CurveRecord>,
) {
    if let Some(f) = eval_fn {
        curves.push(CurveRecord {
            weak_batch,
            split: "test".to_string(),
            loss_t: None,
            loss_c: None,
            loss_wso: None,
            metric_test: Some(f(params)),
        });
    }
}

/// Train by consuming the weak set once in shuffled order, interleaving full
/// steps per the configured alternation, stopping at exhaustion or the weak
/// batch cap. Checkpoints are emitted every `checkpoint_every` weak batches
/// and at the end. Fully deterministic for a given (config, data) pair.
pub fn train(
    params: &mut ModelParameters,
    sets: &LabeledSets,
    config: &TrainConfig,
    source: &ConfidenceSource,
    full_phase: FullPhase,
    eval_fn: Option<&EvalFn>,
) -> Result<TrainOutcome> {
    config.validate()?;
    sets.validate()?;
    if sets.weak.is_empty() {
        return Err(Error::Config(
            "training requires a non-empty weak set".into(),
        ));
    }
    if full_phase != FullPhase::None && sets.full.is_empty() {
        return Err(Error::Config(
            "full-supervision mode requires a non-empty full set".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sampler = EpochSampler::new(sets.weak.len(), &mut rng);
    let mut outcome = TrainOutcome::default();
    let mut window = Window::default();
    let mut weak_count = 0usize;
    let mut last_checkpoint = 0usize;

    push_test_record(0, params, eval_fn, &mut outcome.curves);

    let with_truth = matches!(
        full_phase,
        FullPhase::Confidence {
            with_true_label_update: true
        }
    );
    let full_prob = config.ratio_full as f64 / (config.ratio_full + config.ratio_weak) as f64;

    'training: while weak_count < config.max_weak_batches {
        // stochastic alternation draws the mode per step; the deterministic
        // cycle runs full blocks after every ratio_weak-th weak batch
        if full_phase != FullPhase::None && config.alternation == Alternation::Stochastic {
            while rng.random::<f64>() < full_prob {
                run_full_step(
                    params,
                    sets,
                    config,
                    with_truth,
                    &mut rng,
                    weak_count,
                    &mut window,
                    &mut outcome,
                )?;
            }
        }

        let Some(batch_indices) = sampler.next_batch(config.batch_weak) else {
            break 'training;
        };
        let batch: Vec<&crate::train::sets::WeakExample> =
            batch_indices.iter().map(|&i| &sets.weak[i]).collect();
        weak_count += 1;
        let report = weak_step(params, &batch, source, config, &mut rng, weak_count)?;
        window.absorb(&report);
        outcome.reports.push(report);

        if full_phase != FullPhase::None
            && config.alternation == Alternation::DeterministicCycle
            && weak_count.is_multiple_of(config.ratio_weak)
        {
            for _ in 0..config.ratio_full {
                run_full_step(
                    params,
                    sets,
                    config,
                    with_truth,
                    &mut rng,
                    weak_count,
                    &mut window,
                    &mut outcome,
                )?;
            }
        }

        if weak_count.is_multiple_of(config.checkpoint_every) {
            window.flush(weak_count, &mut outcome.curves);
            push_test_record(weak_count, params, eval_fn, &mut outcome.curves);
            last_checkpoint = weak_count;
        }
    }

    if weak_count > last_checkpoint {
        window.flush(weak_count, &mut outcome.curves);
        push_test_record(weak_count, params, eval_fn, &mut outcome.curves);
    }
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn run_full_step(
    params: &mut ModelParameters,
    sets: &LabeledSets,
    config: &TrainConfig,
    with_truth: bool,
    rng: &mut ChaCha8Rng,
    weak_count: usize,
    window: &mut Window,
    outcome: &mut TrainOutcome,
) -> Result<()> {
    let indices = sample_full_batch(sets.full.len(), config.batch_full, rng)?;
    let batch: Vec<&FullExample> = indices.iter().map(|&i| &sets.full[i]).collect();
    let report = full_step(params, &batch, config, with_truth, rng, weak_count)?;
    window.absorb(&report);
    outcome.reports.push(report);
    Ok(())
}
