//! New-label inference baseline: a generator network learns on the full set
//! to map (representation, weak label) to the true label, then rewrites the
//! weak set with its predictions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::annotate::labels::WeakLabel;
use crate::error::{Error, Result};
use crate::model::params::build_stack;
use crate::model::{
    representation_backward, representation_forward, stack_backward, stack_forward,
    weak_label_width, zero_grads, Instance, ModelParameters, ParamGroup, Task,
};
use crate::tensor::{Activation, AdamState, DenseLayer, Mode};
use crate::train::config::TrainConfig;
use crate::train::sampler::sample_full_batch;
use crate::train::sets::{LabeledSets, WeakExample};

/// The label generator: a shared representation plus a task-shaped head over
/// representation + weak label.
pub struct NliGenerator {
    /// Carrier of the shared representation (its supervision and confidence
    /// heads are unused).
    pub params: ModelParameters,
    head: Vec<DenseLayer>,
    head_opt: AdamState,
    trained: bool,
}

impl NliGenerator {
    pub fn new(params: ModelParameters, hidden: &[usize], seed: u64) -> Self {
        let task = params.task;
        let rep_width = params.representation.output_width();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let head = match task {
            Task::Ranking => build_stack(
                rep_width + weak_label_width(task),
                hidden,
                1,
                Activation::Sigmoid,
                &mut rng,
            ),
            Task::Sentiment => build_stack(
                rep_width + weak_label_width(task),
                hidden,
                crate::annotate::lexicon::SENTIMENT_CLASSES,
                Activation::Softmax,
                &mut rng,
            ),
        };
        let shapes: Vec<usize> = head
            .iter()
            .flat_map(|l| [l.weights.values().len(), l.bias.len()])
            .collect();
        Self {
            params,
            head,
            head_opt: AdamState::new(&shapes),
            trained: false,
        }
    }

    fn head_forward<R: rand::Rng>(
        &self,
        instance: &Instance,
        weak: &WeakLabel,
        dropout: f64,
        mode: Mode,
        rng: &mut R,
    ) -> Result<(crate::model::RepCache, crate::model::StackCache)> {
        let rep = representation_forward(&self.params, instance, dropout, mode, rng)?;
        let mut input = rep.output().to_vec();
        input.extend(weak.as_vec());
        let stack = stack_forward(&self.head, &input, dropout, mode, rng)?;
        Ok((rep, stack))
    }

    /// Train on the full set: task cross-entropy of the generated label
    /// against the true label, for `steps` batches with replacement.
    pub fn train(&mut self, sets: &LabeledSets, config: &TrainConfig, steps: usize) -> Result<()> {
        if sets.full.is_empty() {
            return Err(Error::Config(
                "label generator needs a non-empty full set".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6e6c69);
        for _ in 0..steps {
            let indices = sample_full_batch(sets.full.len(), config.batch_full, &mut rng)?;
            let b = indices.len() as f64;
            let mut head_grads: Vec<Vec<f64>> = self
                .head
                .iter()
                .flat_map(|l| [vec![0.0; l.weights.values().len()], vec![0.0; l.bias.len()]])
                .collect();
            let mut rep_grads = zero_grads(&self.params, ParamGroup::Representation);
            for &i in &indices {
                let ex = &sets.full[i];
                let (rep, stack) = self.head_forward(
                    &ex.instance,
                    &ex.weak,
                    config.dropout,
                    Mode::Train,
                    &mut rng,
                )?;
                let predicted = stack.out.clone();
                let truth = ex.truth.as_vec();
                // p - t on the output logits, scaled by 1/b
                let delta: Vec<f64> = predicted
                    .iter()
                    .zip(&truth)
                    .map(|(p, t)| (p - t) / b)
                    .collect();
                let (tensors, grad_input) = stack_backward(&self.head, &stack, &delta);
                for (acc, t) in head_grads.iter_mut().zip(&tensors) {
                    for (a, v) in acc.iter_mut().zip(t) {
                        *a += v;
                    }
                }
                let rep_width = rep.output().len();
                representation_backward(
                    &self.params,
                    &rep,
                    &grad_input[..rep_width],
                    &mut rep_grads,
                );
            }
            self.params
                .adam_step(ParamGroup::Representation, &rep_grads, config.lr)?;
            let grad_refs: Vec<&[f64]> = head_grads.iter().map(Vec::as_slice).collect();
            let mut tensors: Vec<&mut Vec<f64>> = Vec::with_capacity(self.head.len() * 2);
            for l in self.head.iter_mut() {
                tensors.push(l.weights.values_mut());
                tensors.push(&mut l.bias);
            }
            self.head_opt.update(&mut tensors, &grad_refs, config.lr)?;
        }
        self.trained = true;
        Ok(())
    }

    /// Rewrite every weak label with the generator's prediction.
    pub fn generate(&self, weak_set: &[WeakExample]) -> Result<Vec<WeakExample>> {
        if !self.trained {
            return Err(Error::State("label generator used before training".into()));
        }
        relabel_weak_set(weak_set, |instance, weak| {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let (_, stack) = self.head_forward(instance, weak, 0.0, Mode::Eval, &mut rng)?;
            Ok(match self.params.task {
                Task::Ranking => WeakLabel::Scalar(stack.out[0]),
                Task::Sentiment => WeakLabel::Distribution(stack.out.clone()),
            })
        })
    }
}

/// Apply a relabeling function to every weak example.
pub fn relabel_weak_set<F>(weak_set: &[WeakExample], mut relabel: F) -> Result<Vec<WeakExample>>
where
    F: FnMut(&Instance, &WeakLabel) -> Result<WeakLabel>,
{
    weak_set
        .iter()
        .map(|ex| {
            let label = relabel(&ex.instance, &ex.weak)?;
            label.validate()?;
            Ok(WeakExample {
                instance: ex.instance.clone(),
                weak: label,
            })
        })
        .collect()
}
