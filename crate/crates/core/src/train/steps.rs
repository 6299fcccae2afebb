//! Single optimizer steps: confidence-weighted weak steps, confidence-loss
//! full steps, and plain true-label steps for the fine-tuning baselines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotate::labels::WeakLabel;
use crate::error::{Error, Result};
use crate::model::{
    confidence_backward, confidence_forward, representation_forward, supervision_forward,
    target_backward, task_logit_delta, task_loss, zero_grads, Instance, ModelParameters,
    ParamGroup,
};
use crate::tensor::Mode;
use crate::train::config::TrainConfig;
use crate::train::sets::{FullExample, StepMode, TrainStepReport, WeakExample};

/// Where the per-instance confidence multipliers come from.
#[derive(Clone, Copy)]
pub enum ConfidenceSource<'a> {
    /// Every instance weighs 1: plain unweighted supervision.
    Unit,
    /// The model's own confidence head, evaluated with dropout off.
    Shared,
    /// A separately trained confidence network with its own representation.
    External(&'a ModelParameters),
    /// Explicit multipliers, one per batch item.
    Fixed(&'a [f64]),
}

/// Evaluate the confidence multiplier of every batch item. Dropout stays
/// off: the scores act as constants in the weak step, with no gradient
/// flowing back to the confidence group.
pub fn compute_confidences(
    params: &ModelParameters,
    batch: &[&WeakExample],
    source: &ConfidenceSource,
) -> Result<Vec<f64>> {
    match source {
        ConfidenceSource::Unit => Ok(vec![1.0; batch.len()]),
        ConfidenceSource::Fixed(values) => {
            if values.len() != batch.len() {
                return Err(Error::Shape(format!(
                    "{} fixed confidences for a batch of {}",
                    values.len(),
                    batch.len()
                )));
            }
            Ok(values.to_vec())
        }
        ConfidenceSource::Shared => confidence_scores_via(params, batch),
        ConfidenceSource::External(other) => confidence_scores_via(other, batch),
    }
}

fn confidence_scores_via(net: &ModelParameters, batch: &[&WeakExample]) -> Result<Vec<f64>> {
    // eval mode consumes no randomness
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    batch
        .iter()
        .map(|ex| {
            let rep = representation_forward(net, &ex.instance, 0.0, Mode::Eval, &mut rng)?;
            let (c, _) =
                confidence_forward(net, rep.output(), &ex.weak, 0.0, Mode::Eval, &mut rng)?;
            Ok(c)
        })
        .collect()
}

/// Add `l2 * parameter` into the gradients of a group.
fn add_l2(
    params: &ModelParameters,
    group: ParamGroup,
    grads: &mut crate::model::GroupGrads,
    l2: f64,
) {
    for (g, p) in grads.tensors.iter_mut().zip(params.group_values(group)) {
        for (gi, &pi) in g.iter_mut().zip(p) {
            *gi += l2 * pi;
        }
    }
}

/// Accumulate task-loss gradients over weighted items. Returns
/// (supervision grads, representation grads, weighted mean loss,
/// unweighted mean loss). Items are visited in batch order.
fn accumulate_task_grads<R: Rng>(
    params: &ModelParameters,
    items: &[(&Instance, &WeakLabel, f64)],
    dropout: f64,
    rng: &mut R,
) -> Result<(crate::model::GroupGrads, crate::model::GroupGrads, f64, f64)> {
    let b = items.len() as f64;
    let mut sup_grads = zero_grads(params, ParamGroup::Supervision);
    let mut rep_grads = zero_grads(params, ParamGroup::Representation);
    let mut weighted = 0.0;
    let mut unweighted = 0.0;
    for (instance, label, weight) in items {
        let rep = representation_forward(params, instance, dropout, Mode::Train, rng)?;
        let (pred, stack) = supervision_forward(params, rep.output(), dropout, Mode::Train, rng)?;
        let loss = task_loss(&pred, label)?;
        weighted += weight * loss / b;
        unweighted += loss / b;
        let mut delta = task_logit_delta(&pred, label)?;
        for d in &mut delta {
            *d *= weight / b;
        }
        target_backward(params, &rep, &stack, &delta, &mut sup_grads, &mut rep_grads);
    }
    Ok((sup_grads, rep_grads, weighted, unweighted))
}

/// The pre-optimizer aggregated gradients of one confidence-weighted weak
/// batch: the batch loss is the mean over items of confidence times the
/// task loss against the weak label. Returns (supervision grads,
/// representation grads, weighted mean loss, unweighted mean loss). The
/// gradients are linear in the confidence vector.
pub fn weak_batch_gradients<R: Rng>(
    params: &ModelParameters,
    batch: &[&WeakExample],
    confidences: &[f64],
    dropout: f64,
    rng: &mut R,
) -> Result<(crate::model::GroupGrads, crate::model::GroupGrads, f64, f64)> {
    if batch.len() != confidences.len() {
        return Err(Error::Shape(format!(
            "{} confidences for a batch of {}",
            confidences.len(),
            batch.len()
        )));
    }
    let items: Vec<(&Instance, &WeakLabel, f64)> = batch
        .iter()
        .zip(confidences)
        .map(|(ex, &c)| (&ex.instance, &ex.weak, c))
        .collect();
    accumulate_task_grads(params, &items, dropout, rng)
}

/// One weak-supervision step: the batch loss is the confidence-weighted mean
/// of per-instance task losses against the weak labels, and only the
/// representation and supervision groups are updated.
pub fn weak_step(
    params: &mut ModelParameters,
    batch: &[&WeakExample],
    source: &ConfidenceSource,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
    batch_index: usize,
) -> Result<TrainStepReport> {
    if batch.is_empty() {
        return Err(Error::DegenerateInput("empty weak batch".into()));
    }
    let confidences = compute_confidences(params, batch, source)?;
    let (mut sup_grads, mut rep_grads, weighted, unweighted) =
        weak_batch_gradients(params, batch, &confidences, config.dropout, rng)?;
    if config.l2_weight > 0.0 {
        add_l2(
            params,
            ParamGroup::Supervision,
            &mut sup_grads,
            config.l2_weight,
        );
        add_l2(
            params,
            ParamGroup::Representation,
            &mut rep_grads,
            config.l2_weight,
        );
    }
    params.adam_step(ParamGroup::Representation, &rep_grads, config.lr)?;
    params.adam_step(ParamGroup::Supervision, &sup_grads, config.lr)?;
    let mean_confidence = confidences.iter().sum::<f64>() / confidences.len() as f64;
    Ok(TrainStepReport {
        mode: StepMode::Weak,
        loss: weighted,
        loss_unweighted: Some(unweighted),
        mean_confidence,
        batch_index,
    })
}

/// One full-supervision step: binary cross-entropy between predicted and
/// target confidence scores, updating the representation and confidence
/// groups. With `with_true_label_update`, a second optimizer call applies
/// the unweighted true-label task loss to representation and supervision.
pub fn full_step(
    params: &mut ModelParameters,
    batch: &[&FullExample],
    config: &TrainConfig,
    with_true_label_update: bool,
    rng: &mut ChaCha8Rng,
    batch_index: usize,
) -> Result<TrainStepReport> {
    if batch.is_empty() {
        return Err(Error::DegenerateInput("empty full batch".into()));
    }
    let b = batch.len() as f64;
    let mut conf_grads = zero_grads(params, ParamGroup::Confidence);
    let mut rep_grads = zero_grads(params, ParamGroup::Representation);
    let mut loss = 0.0;
    let mut mean_confidence = 0.0;
    for ex in batch {
        let rep = representation_forward(params, &ex.instance, config.dropout, Mode::Train, rng)?;
        let (c_hat, stack) = confidence_forward(
            params,
            rep.output(),
            &ex.weak,
            config.dropout,
            Mode::Train,
            rng,
        )?;
        loss += crate::tensor::binary_cross_entropy(ex.confidence.0, c_hat) / b;
        mean_confidence += c_hat / b;
        let delta = crate::tensor::bce_logit_delta(ex.confidence.0, c_hat) / b;
        confidence_backward(params, &rep, &stack, delta, &mut conf_grads, &mut rep_grads);
    }
    params.adam_step(ParamGroup::Representation, &rep_grads, config.lr)?;
    params.adam_step(ParamGroup::Confidence, &conf_grads, config.lr)?;

    if with_true_label_update {
        let items: Vec<(&Instance, &WeakLabel, f64)> = batch
            .iter()
            .map(|ex| (&ex.instance, &ex.truth, 1.0))
            .collect();
        let (sup_grads, rep_grads, _, _) =
            accumulate_task_grads(params, &items, config.dropout, rng)?;
        params.adam_step(ParamGroup::Representation, &rep_grads, config.lr)?;
        params.adam_step(ParamGroup::Supervision, &sup_grads, config.lr)?;
    }

    Ok(TrainStepReport {
        mode: StepMode::Full,
        loss,
        loss_unweighted: None,
        mean_confidence,
        batch_index,
    })
}

/// One plain supervised step against true labels, updating only the chosen
/// groups (the fine-tuning baselines freeze one of them).
pub fn true_label_step(
    params: &mut ModelParameters,
    batch: &[&FullExample],
    config: &TrainConfig,
    update_representation: bool,
    update_supervision: bool,
    rng: &mut ChaCha8Rng,
    batch_index: usize,
) -> Result<TrainStepReport> {
    if batch.is_empty() {
        return Err(Error::DegenerateInput("empty full batch".into()));
    }
    let items: Vec<(&Instance, &WeakLabel, f64)> = batch
        .iter()
        .map(|ex| (&ex.instance, &ex.truth, 1.0))
        .collect();
    let (sup_grads, rep_grads, loss, _) =
        accumulate_task_grads(params, &items, config.dropout, rng)?;
    if update_representation {
        params.adam_step(ParamGroup::Representation, &rep_grads, config.lr)?;
    }
    if update_supervision {
        params.adam_step(ParamGroup::Supervision, &sup_grads, config.lr)?;
    }
    Ok(TrainStepReport {
        mode: StepMode::Full,
        loss,
        loss_unweighted: Some(loss),
        mean_confidence: 1.0,
        batch_index,
    })
}
