//! Forward and backward passes through the shared representation, the
//! supervision head, and the confidence head.
//!
//! Every forward returns the cache its exact backward needs. Backward
//! passes write into [`GroupGrads`] laid out in the group tensor order of
//! [`ModelParameters::group_values`].

use rand::{Rng, SeedableRng};

use crate::annotate::labels::WeakLabel;
use crate::data::vocab::PAD_ID;
use crate::error::{Error, Result};
use crate::model::instance::{Instance, RankInstance, SentenceInstance};
use crate::model::params::{GroupGrads, ModelParameters, ParamGroup, Representation};
use crate::tensor::{
    composition_backward, term_weighted_composition, ComposeCache, ConvCache, DenseCache,
    DropoutMask, Matrix, Mode,
};

/// A target-network output: a preference probability (ranking) or a class
/// distribution (sentiment).
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    Probability(f64),
    Distribution(Vec<f64>),
}

impl Prediction {
    pub fn as_distribution(&self) -> Vec<f64> {
        match self {
            Prediction::Probability(p) => vec![*p],
            Prediction::Distribution(d) => d.clone(),
        }
    }

    /// Argmax class with lowest-index tie break (sentiment only).
    pub fn argmax(&self) -> usize {
        match self {
            Prediction::Probability(p) => usize::from(*p < 0.5),
            Prediction::Distribution(d) => {
                let mut best = 0;
                for (i, &v) in d.iter().enumerate() {
                    if v > d[best] {
                        best = i;
                    }
                }
                best
            }
        }
    }
}

/// Cache of one softmax-weighted composition.
#[derive(Debug, Clone)]
pub struct ComposedText {
    pub tokens: Vec<u32>,
    pub embeds: Matrix,
    pub compose: ComposeCache,
}

/// Representation cache for either task.
#[derive(Debug, Clone)]
pub enum RepCache {
    Rank {
        parts: Vec<ComposedText>,
        out: Vec<f64>,
    },
    Sentence {
        tokens: Vec<u32>,
        embeds: Matrix,
        conv: ConvCache,
        mask: DropoutMask,
        out: Vec<f64>,
    },
}

impl RepCache {
    pub fn output(&self) -> &[f64] {
        match self {
            RepCache::Rank { out, .. } => out,
            RepCache::Sentence { out, .. } => out,
        }
    }
}

fn compose_text(params: &ModelParameters, tokens: &[u32], what: &str) -> Result<ComposedText> {
    let Representation::Rank {
        embedding,
        term_weights,
    } = &params.representation
    else {
        return Err(Error::State(
            "rank representation requested from a sentiment model".into(),
        ));
    };
    if tokens.is_empty() {
        return Err(Error::DegenerateInput(format!(
            "empty {what} in ranking instance"
        )));
    }
    let embeds = embedding.lookup(tokens)?;
    let weights: Vec<f64> = tokens.iter().map(|&t| term_weights.get(t)).collect();
    let compose = term_weighted_composition(&embeds, &weights)?;
    Ok(ComposedText {
        tokens: tokens.to_vec(),
        embeds,
        compose,
    })
}

/// Concatenation of the three compositions over query, preferred document,
/// and dispreferred document.
pub fn rank_representation(params: &ModelParameters, instance: &RankInstance) -> Result<RepCache> {
    let parts = vec![
        compose_text(params, &instance.query, "query")?,
        compose_text(params, &instance.doc_pos, "preferred document")?,
        compose_text(params, &instance.doc_neg, "dispreferred document")?,
    ];
    let mut out = Vec::with_capacity(3 * parts[0].compose.out.len());
    for p in &parts {
        out.extend_from_slice(&p.compose.out);
    }
    Ok(RepCache::Rank { parts, out })
}

/// Embedding lookup, convolution with relu and max pooling, then dropout.
pub fn sentence_representation<R: Rng>(
    params: &ModelParameters,
    instance: &SentenceInstance,
    dropout: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<RepCache> {
    let Representation::Sentence { embedding, conv } = &params.representation else {
        return Err(Error::State(
            "sentence representation requested from a ranking model".into(),
        ));
    };
    let embeds = embedding.lookup(&instance.tokens)?;
    let conv_cache = conv.encode(&embeds)?;
    let mask = crate::tensor::dropout_mask(conv_cache.pooled.len(), dropout, mode, rng)?;
    let out = mask.apply(&conv_cache.pooled);
    Ok(RepCache::Sentence {
        tokens: instance.tokens.clone(),
        embeds,
        conv: conv_cache,
        mask,
        out,
    })
}

/// Shared-representation forward for either task.
pub fn representation_forward<R: Rng>(
    params: &ModelParameters,
    instance: &Instance,
    dropout: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<RepCache> {
    match instance {
        Instance::Rank(r) => rank_representation(params, r),
        Instance::Sentence(s) => sentence_representation(params, s, dropout, mode, rng),
    }
}

/// Backward through the representation. Adds into `grads`, which must be
/// shaped for the representation group. The pad embedding row stays frozen.
pub fn representation_backward(
    params: &ModelParameters,
    cache: &RepCache,
    grad_rep: &[f64],
    grads: &mut GroupGrads,
) {
    match (&params.representation, cache) {
        (Representation::Rank { embedding, .. }, RepCache::Rank { parts, .. }) => {
            let m = embedding.dim();
            for (p, chunk) in parts.iter().zip(grad_rep.chunks(m)) {
                let (grad_embeds, grad_weights) =
                    composition_backward(&p.embeds, &p.compose, chunk);
                scatter_embedding_grad(
                    embedding.vocab_size(),
                    m,
                    &p.tokens,
                    &grad_embeds,
                    &mut grads.tensors[0],
                );
                for (i, &t) in p.tokens.iter().enumerate() {
                    grads.tensors[1][t as usize] += grad_weights[i];
                }
            }
        }
        (
            Representation::Sentence { embedding, conv },
            RepCache::Sentence {
                tokens,
                embeds,
                conv: conv_cache,
                mask,
                ..
            },
        ) => {
            let grad_pooled = mask.backward(grad_rep);
            let (conv_grads, grad_embeds) = conv.backward(embeds, conv_cache, &grad_pooled);
            let m = embedding.dim();
            scatter_embedding_grad(
                embedding.vocab_size(),
                m,
                tokens,
                &grad_embeds,
                &mut grads.tensors[0],
            );
            for (f, fg) in conv_grads.filters.iter().enumerate() {
                for (g, v) in grads.tensors[1 + f].iter_mut().zip(fg.values()) {
                    *g += v;
                }
            }
            let bias_tensor = grads.tensors.len() - 1;
            for (g, v) in grads.tensors[bias_tensor].iter_mut().zip(&conv_grads.bias) {
                *g += v;
            }
        }
        _ => unreachable!("representation cache from the wrong task"),
    }
}

/// Scatter per-column gradients into the flat vocab x m embedding gradient,
/// skipping the pad row.
fn scatter_embedding_grad(
    vocab_size: usize,
    m: usize,
    tokens: &[u32],
    grad_cols: &Matrix,
    flat: &mut [f64],
) {
    debug_assert_eq!(flat.len(), vocab_size * m);
    for (i, &t) in tokens.iter().enumerate() {
        if t == PAD_ID {
            continue;
        }
        let base = t as usize * m;
        for r in 0..m {
            flat[base + r] += grad_cols.get(r, i);
        }
    }
}

/// Cache of one pass through a dense stack.
#[derive(Debug, Clone)]
pub struct StackCache {
    /// Input to each layer, after the previous layer's dropout.
    pub inputs: Vec<Vec<f64>>,
    pub dense: Vec<DenseCache>,
    /// Dropout masks after each hidden layer.
    pub masks: Vec<DropoutMask>,
    pub out: Vec<f64>,
}

/// Run a dense stack: hidden layers with dropout in train mode, output layer
/// bare.
pub fn stack_forward<R: Rng>(
    layers: &[crate::tensor::DenseLayer],
    input: &[f64],
    dropout: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<StackCache> {
    let mut cache = StackCache {
        inputs: Vec::with_capacity(layers.len()),
        dense: Vec::with_capacity(layers.len()),
        masks: Vec::with_capacity(layers.len().saturating_sub(1)),
        out: Vec::new(),
    };
    let mut current = input.to_vec();
    for (k, layer) in layers.iter().enumerate() {
        cache.inputs.push(current.clone());
        let dense = layer.apply(&current)?;
        let is_output = k + 1 == layers.len();
        current = if is_output {
            dense.out.clone()
        } else {
            let mask = crate::tensor::dropout_mask(dense.out.len(), dropout, mode, rng)?;
            let dropped = mask.apply(&dense.out);
            cache.masks.push(mask);
            dropped
        };
        cache.dense.push(dense);
    }
    cache.out = current;
    Ok(cache)
}

/// Backward through a stack given dL/d(pre-activation of the output layer),
/// the form cross-entropy heads produce. Returns per-tensor grads in the
/// [w0, b0, w1, b1, ...] order plus dL/d(stack input).
pub fn stack_backward(
    layers: &[crate::tensor::DenseLayer],
    cache: &StackCache,
    output_delta: &[f64],
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut tensors = vec![Vec::new(); layers.len() * 2];
    let last = layers.len() - 1;
    let (grads, mut grad_input) = layers[last].backward_from_pre(&cache.inputs[last], output_delta);
    tensors[2 * last] = grads.weights;
    tensors[2 * last + 1] = grads.bias;
    for k in (0..last).rev() {
        // undo the dropout between layer k and k+1, then the activation
        let grad_out = cache.masks[k].backward(&grad_input);
        let (grads, gi) = layers[k].backward(&cache.inputs[k], &cache.dense[k], &grad_out);
        tensors[2 * k] = grads.weights;
        tensors[2 * k + 1] = grads.bias;
        grad_input = gi;
    }
    (tensors, grad_input)
}

/// Target-network head forward.
pub fn supervision_forward<R: Rng>(
    params: &ModelParameters,
    representation: &[f64],
    dropout: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<(Prediction, StackCache)> {
    let cache = stack_forward(&params.supervision, representation, dropout, mode, rng)?;
    let prediction = match params.task {
        crate::model::params::Task::Ranking => Prediction::Probability(cache.out[0]),
        crate::model::params::Task::Sentiment => Prediction::Distribution(cache.out.clone()),
    };
    Ok((prediction, cache))
}

/// Confidence head forward over representation + weak label.
pub fn confidence_forward<R: Rng>(
    params: &ModelParameters,
    representation: &[f64],
    weak_label: &WeakLabel,
    dropout: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<(f64, StackCache)> {
    let expected = params.confidence[0].in_dim();
    let mut input = representation.to_vec();
    input.extend(weak_label.as_vec());
    if input.len() != expected {
        return Err(Error::Shape(format!(
            "confidence head expects {expected} inputs, got {} (weak label width {})",
            input.len(),
            weak_label.width()
        )));
    }
    let cache = stack_forward(&params.confidence, &input, dropout, mode, rng)?;
    Ok((cache.out[0], cache))
}

/// Backward from the supervision head's logit delta into supervision and
/// representation gradients.
pub fn target_backward(
    params: &ModelParameters,
    rep_cache: &RepCache,
    stack_cache: &StackCache,
    output_delta: &[f64],
    supervision_grads: &mut GroupGrads,
    representation_grads: &mut GroupGrads,
) {
    let (tensors, grad_rep) = stack_backward(&params.supervision, stack_cache, output_delta);
    for (acc, t) in supervision_grads.tensors.iter_mut().zip(&tensors) {
        for (a, v) in acc.iter_mut().zip(t) {
            *a += v;
        }
    }
    representation_backward(params, rep_cache, &grad_rep, representation_grads);
}

/// Backward from the confidence head's logit delta into confidence and
/// representation gradients. The weak-label slice of the input gradient is
/// discarded: labels are constants.
pub fn confidence_backward(
    params: &ModelParameters,
    rep_cache: &RepCache,
    stack_cache: &StackCache,
    logit_delta: f64,
    confidence_grads: &mut GroupGrads,
    representation_grads: &mut GroupGrads,
) {
    let (tensors, grad_input) = stack_backward(&params.confidence, stack_cache, &[logit_delta]);
    for (acc, t) in confidence_grads.tensors.iter_mut().zip(&tensors) {
        for (a, v) in acc.iter_mut().zip(t) {
            *a += v;
        }
    }
    let rep_width = rep_cache.output().len();
    representation_backward(
        params,
        rep_cache,
        &grad_input[..rep_width],
        representation_grads,
    );
}

/// Convenience: zeroed gradients for a group of this model.
pub fn zero_grads(params: &ModelParameters, group: ParamGroup) -> GroupGrads {
    GroupGrads::zeros(&params.group_shapes(group))
}

/// Deterministic eval-mode prediction for an instance.
pub fn predict(params: &ModelParameters, instance: &Instance) -> Result<Prediction> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let rep = representation_forward(params, instance, 0.0, Mode::Eval, &mut rng)?;
    let (pred, _) = supervision_forward(params, rep.output(), 0.0, Mode::Eval, &mut rng)?;
    Ok(pred)
}

/// Task cross-entropy of a prediction against a label of the same shape:
/// binary for ranking, categorical for sentiment.
pub fn task_loss(prediction: &Prediction, label: &WeakLabel) -> Result<f64> {
    match (prediction, label) {
        (Prediction::Probability(p), WeakLabel::Scalar(y)) => {
            Ok(crate::tensor::binary_cross_entropy(*y, *p))
        }
        (Prediction::Distribution(p), WeakLabel::Distribution(y)) => {
            crate::tensor::categorical_cross_entropy(y, p)
        }
        _ => Err(Error::Shape(
            "prediction and label have different shapes".into(),
        )),
    }
}

/// dL/d(logits) of the task cross-entropy: `p - y` in both cases.
pub fn task_logit_delta(prediction: &Prediction, label: &WeakLabel) -> Result<Vec<f64>> {
    match (prediction, label) {
        (Prediction::Probability(p), WeakLabel::Scalar(y)) => {
            Ok(vec![crate::tensor::bce_logit_delta(*y, *p)])
        }
        (Prediction::Distribution(p), WeakLabel::Distribution(y)) => {
            if p.len() != y.len() {
                return Err(Error::Shape("label width differs from prediction".into()));
            }
            Ok(crate::tensor::cce_logit_delta(y, p))
        }
        _ => Err(Error::Shape(
            "prediction and label have different shapes".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::vocab::Vocabulary;
    use crate::model::params::{init_parameters, NetworkDims, Task};
    use crate::tensor::Matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vocab(n: usize) -> Vocabulary {
        let mut v = Vocabulary::new();
        for i in 0..n {
            v.intern(&format!("w{i}"));
        }
        v
    }

    fn small_dims() -> NetworkDims {
        NetworkDims {
            embedding_dim: 4,
            conv_filters: 3,
            conv_window: 2,
            supervision_hidden: vec![5],
            confidence_hidden: vec![5],
        }
    }

    #[test]
    fn rank_representation_repeats_single_token() {
        let v = vocab(4);
        let params = init_parameters(Task::Ranking, &small_dims(), &v, 9, None, None).unwrap();
        let t = v.id("w1");
        let inst = RankInstance::new(vec![t], vec![t], vec![t]).unwrap();
        let cache = rank_representation(&params, &inst).unwrap();
        let out = cache.output();
        let m = 4;
        let row = params.representation.embedding().vectors.row(t as usize);
        for block in 0..3 {
            assert_eq!(&out[block * m..(block + 1) * m], row);
        }
    }

    #[test]
    fn rank_representation_uniform_weights_give_mean_embedding() {
        // term weights init to zero without idf, so composition is the mean
        let v = vocab(4);
        let params = init_parameters(Task::Ranking, &small_dims(), &v, 9, None, None).unwrap();
        let a = v.id("w0");
        let b = v.id("w2");
        let inst = RankInstance::new(vec![a, b], vec![a], vec![b]).unwrap();
        let cache = rank_representation(&params, &inst).unwrap();
        let emb = params.representation.embedding();
        let ra = emb.vectors.row(a as usize);
        let rb = emb.vectors.row(b as usize);
        for i in 0..4 {
            let want = (ra[i] + rb[i]) / 2.0;
            assert!((cache.output()[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_representation_matches_direct_recomputation() {
        // independent reimplementation of the weighted composition
        use crate::tensor::softmax;
        let v = vocab(8);
        let mut params = init_parameters(Task::Ranking, &small_dims(), &v, 17, None, None).unwrap();
        // give the term weights some variety
        if let crate::model::params::Representation::Rank { .. } = &params.representation {
            let idf: Vec<f64> = (0..v.len()).map(|i| (i as f64) * 0.3 - 1.0).collect();
            params =
                init_parameters(Task::Ranking, &small_dims(), &v, 17, None, Some(&idf)).unwrap();
        }
        let inst = RankInstance::new(vec![2, 3, 2], vec![4, 5], vec![6, 7, 3, 2]).unwrap();
        let cache = rank_representation(&params, &inst).unwrap();

        let crate::model::params::Representation::Rank {
            embedding,
            term_weights,
        } = &params.representation
        else {
            panic!()
        };
        let mut want = Vec::new();
        for text in [&inst.query, &inst.doc_pos, &inst.doc_neg] {
            let w: Vec<f64> = text.iter().map(|&t| term_weights.get(t)).collect();
            let p = softmax(&w);
            for r in 0..4 {
                let mut s = 0.0;
                for (i, &t) in text.iter().enumerate() {
                    s += p[i] * embedding.vectors.row(t as usize)[r];
                }
                want.push(s);
            }
        }
        for (g, w) in cache.output().iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn swapping_documents_permutes_blocks() {
        let v = vocab(8);
        let params = init_parameters(Task::Ranking, &small_dims(), &v, 21, None, None).unwrap();
        let inst = RankInstance::new(vec![2, 3], vec![4, 5], vec![6, 7]).unwrap();
        let orig = rank_representation(&params, &inst).unwrap();
        let swapped = rank_representation(&params, &inst.swapped()).unwrap();
        let m = 4;
        assert_eq!(&orig.output()[..m], &swapped.output()[..m]);
        assert_eq!(&orig.output()[m..2 * m], &swapped.output()[2 * m..3 * m]);
        assert_eq!(&orig.output()[2 * m..3 * m], &swapped.output()[m..2 * m]);
    }

    #[test]
    fn all_pad_sentence_with_zero_bias_gives_zero_vector() {
        // pad rows are zero; conv of a zero sentence with zero bias pools to 0
        let v = vocab(3);
        let params = init_parameters(Task::Sentiment, &small_dims(), &v, 3, None, None).unwrap();
        let inst = SentenceInstance::padded(vec![PAD_ID, PAD_ID], 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cache = sentence_representation(&params, &inst, 0.0, Mode::Eval, &mut rng).unwrap();
        assert!(cache.output().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn eval_mode_is_deterministic() {
        let v = vocab(6);
        let params = init_parameters(Task::Sentiment, &small_dims(), &v, 3, None, None).unwrap();
        let inst = SentenceInstance::padded(vec![2, 3, 4, 5], 2).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(1);
        let mut r2 = ChaCha8Rng::seed_from_u64(999);
        let a = sentence_representation(&params, &inst, 0.5, Mode::Eval, &mut r1).unwrap();
        let b = sentence_representation(&params, &inst, 0.5, Mode::Eval, &mut r2).unwrap();
        assert_eq!(a.output(), b.output());
    }

    #[test]
    fn zero_weight_heads_predict_half_and_uniform() {
        let v = vocab(4);
        let mut params = init_parameters(Task::Ranking, &small_dims(), &v, 5, None, None).unwrap();
        for layer in &mut params.supervision {
            for w in layer.weights.values_mut().iter_mut() {
                *w = 0.0;
            }
            for b in layer.bias.iter_mut() {
                *b = 0.0;
            }
        }
        let rep = vec![0.3; 12];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (pred, _) = supervision_forward(&params, &rep, 0.0, Mode::Eval, &mut rng).unwrap();
        assert_eq!(pred, Prediction::Probability(0.5));

        let mut sent = init_parameters(Task::Sentiment, &small_dims(), &v, 5, None, None).unwrap();
        for layer in &mut sent.supervision {
            for w in layer.weights.values_mut().iter_mut() {
                *w = 0.0;
            }
        }
        let rep = vec![0.1, 0.2, 0.3];
        let (pred, _) = supervision_forward(&sent, &rep, 0.0, Mode::Eval, &mut rng).unwrap();
        let Prediction::Distribution(d) = pred else {
            panic!()
        };
        for p in d {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sentiment_prediction_sums_to_one() {
        let v = vocab(10);
        let params = init_parameters(Task::Sentiment, &small_dims(), &v, 11, None, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            use rand::Rng;
            let len = rng.random_range(2..8);
            let tokens: Vec<u32> = (0..len).map(|_| rng.random_range(2..12)).collect();
            let inst = SentenceInstance::padded(tokens, 2).unwrap();
            let rep = sentence_representation(&params, &inst, 0.0, Mode::Eval, &mut rng).unwrap();
            let (pred, _) =
                supervision_forward(&params, rep.output(), 0.0, Mode::Eval, &mut rng).unwrap();
            let Prediction::Distribution(d) = pred else {
                panic!()
            };
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_weight_confidence_outputs_half() {
        let v = vocab(4);
        let mut params = init_parameters(Task::Ranking, &small_dims(), &v, 5, None, None).unwrap();
        for layer in &mut params.confidence {
            for w in layer.weights.values_mut().iter_mut() {
                *w = 0.0;
            }
        }
        let rep = vec![0.4; 12];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (c, _) = confidence_forward(
            &params,
            &rep,
            &WeakLabel::Scalar(0.7),
            0.0,
            Mode::Eval,
            &mut rng,
        )
        .unwrap();
        assert_eq!(c, 0.5);
    }

    #[test]
    fn confidence_is_strictly_inside_unit_interval() {
        let v = vocab(4);
        let params = init_parameters(Task::Ranking, &small_dims(), &v, 5, None, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            use rand::Rng;
            let rep: Vec<f64> = (0..12).map(|_| rng.random_range(-3.0..3.0)).collect();
            let weak = WeakLabel::Scalar(rng.random_range(0.0..=1.0));
            let (c, _) =
                confidence_forward(&params, &rep, &weak, 0.0, Mode::Eval, &mut rng).unwrap();
            assert!(c > 0.0 && c < 1.0);
        }
    }

    #[test]
    fn confidence_weak_label_width_mismatch_rejected() {
        let v = vocab(4);
        let params = init_parameters(Task::Ranking, &small_dims(), &v, 5, None, None).unwrap();
        let rep = vec![0.0; 12];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let res = confidence_forward(
            &params,
            &rep,
            &WeakLabel::Distribution(vec![0.3, 0.3, 0.4]),
            0.0,
            Mode::Eval,
            &mut rng,
        );
        assert!(matches!(res, Err(Error::Shape(_))));
    }

    #[test]
    fn grad_matrix_layout_matches_matrix_values() {
        // scatter_embedding_grad writes row-major vocab x m, same as Matrix
        let mut flat = vec![0.0; 3 * 2];
        let grad_cols = Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        scatter_embedding_grad(3, 2, &[2, 2], &grad_cols, &mut flat);
        // token 2 gathered twice: column 0 (1,3) + column 1 (2,4) = (3,7)
        assert_eq!(&flat[4..6], &[3.0, 7.0]);
    }
}
