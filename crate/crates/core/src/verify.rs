//! Gradient verification harness: finite-difference checks over every layer
//! type and both composed networks, for both tasks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotate::labels::WeakLabel;
use crate::error::Result;
use crate::model::{
    confidence_backward, confidence_forward, init_parameters, representation_forward,
    supervision_forward, target_backward, task_logit_delta, task_loss, zero_grads, Instance,
    ModelParameters, NetworkDims, ParamGroup, RankInstance, SentenceInstance, Task,
};
use crate::tensor::{grad_check, Activation, DenseLayer, Matrix, Mode};

/// Threshold every check must stay under.
pub const GRAD_CHECK_TOLERANCE: f64 = 1e-4;
/// Central-difference step used throughout.
pub const GRAD_CHECK_PERTURBATION: f64 = 1e-4;
/// Draws are resampled until every relu pre-activation and pooling margin
/// clears this distance from its kink; central differences across a
/// non-differentiable point would otherwise measure the chord, not the
/// gradient.
pub const KINK_MARGIN: f64 = 1e-3;

/// Outcome of one named check: the worst relative error seen over all draws.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub name: String,
    pub max_rel_error: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < GRAD_CHECK_TOLERANCE
    }
}

fn small_dims() -> NetworkDims {
    NetworkDims {
        embedding_dim: 4,
        conv_filters: 3,
        conv_window: 2,
        supervision_hidden: vec![6],
        confidence_hidden: vec![6],
    }
}

fn tiny_vocab() -> crate::data::Vocabulary {
    let mut v = crate::data::Vocabulary::new();
    for i in 0..8 {
        v.intern(&format!("w{i}"));
    }
    v
}

fn rank_instance<R: Rng>(rng: &mut R) -> RankInstance {
    let text = |rng: &mut R| -> Vec<u32> {
        let len = rng.random_range(1..5);
        (0..len).map(|_| rng.random_range(2..10)).collect()
    };
    RankInstance::new(text(rng), text(rng), text(rng)).expect("non-empty")
}

fn sentence_instance<R: Rng>(rng: &mut R) -> SentenceInstance {
    let len = rng.random_range(2..7);
    let tokens = (0..len).map(|_| rng.random_range(2..10)).collect();
    SentenceInstance::padded(tokens, 2).expect("non-empty")
}

fn random_distribution<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|x| x / sum).collect()
}

/// True when every relu pre-activation in the stacks and every pooling
/// decision in the representation sits clear of its kink.
fn case_is_smooth(
    params: &ModelParameters,
    instance: &Instance,
    label: &WeakLabel,
) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let rep = representation_forward(params, instance, 0.0, Mode::Eval, &mut rng)?;

    // convolution: relu gates and the max-pool winner must be stable
    if let (
        crate::model::Representation::Sentence { conv, .. },
        crate::model::RepCache::Sentence { embeds, .. },
    ) = (&params.representation, &rep)
    {
        let h = conv.window();
        let positions = embeds.cols() - h + 1;
        for (r, filter) in conv.filters.iter().enumerate() {
            let mut activations: Vec<f64> = Vec::with_capacity(positions);
            for i in 0..positions {
                let mut pre = conv.bias[r];
                for k in 0..conv.embed_dim() {
                    for j in 0..h {
                        pre += embeds.get(k, i + j) * filter.get(k, j);
                    }
                }
                if pre.abs() < KINK_MARGIN {
                    return Ok(false);
                }
                activations.push(pre.max(0.0));
            }
            activations.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
            if activations.len() >= 2
                && activations[0] > 0.0
                && activations[0] - activations[1] < KINK_MARGIN
            {
                return Ok(false);
            }
        }
    }

    let stack_is_smooth = |cache: &crate::model::StackCache, layers: &[DenseLayer]| -> bool {
        for (layer, dense) in layers.iter().zip(&cache.dense) {
            if layer.activation == Activation::Relu
                && dense.pre.iter().any(|p| p.abs() < KINK_MARGIN)
            {
                return false;
            }
        }
        true
    };
    let (_, sup_cache) = supervision_forward(params, rep.output(), 0.0, Mode::Eval, &mut rng)?;
    if !stack_is_smooth(&sup_cache, &params.supervision) {
        return Ok(false);
    }
    let (_, conf_cache) =
        confidence_forward(params, rep.output(), label, 0.0, Mode::Eval, &mut rng)?;
    if !stack_is_smooth(&conf_cache, &params.confidence) {
        return Ok(false);
    }
    Ok(true)
}

/// Check one dense layer against finite differences: the loss is a fixed
/// random linear functional of the layer output, which exercises the full
/// activation Jacobian.
fn check_dense(activation: Activation, draws: usize, base_seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for draw in 0..draws {
        let (layer, input, probe) = {
            let mut salt = 0u64;
            loop {
                let mut rng = ChaCha8Rng::seed_from_u64(base_seed + draw as u64 + salt * 7919);
                let (in_dim, out_dim) = (rng.random_range(2..6), rng.random_range(2..6));
                let layer = DenseLayer::init(in_dim, out_dim, activation, &mut rng);
                let input: Vec<f64> = (0..in_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let probe: Vec<f64> = (0..out_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let pre = layer.apply(&input)?.pre;
                if activation != Activation::Relu || pre.iter().all(|p| p.abs() >= KINK_MARGIN) {
                    break (layer, input, probe);
                }
                salt += 1;
            }
        };
        let (in_dim, out_dim) = (layer.in_dim(), layer.out_dim());

        let cache = layer.apply(&input)?;
        let (grads, _) = layer.backward(&input, &cache, &probe);
        let mut analytic = grads.weights.clone();
        analytic.extend(grads.bias.iter());

        let mut flat = layer.weights.values().to_vec();
        flat.extend(layer.bias.iter());
        let n_w = layer.weights.values().len();
        let loss = |flat: &[f64]| {
            let l = DenseLayer {
                weights: Matrix::from_vec(out_dim, in_dim, flat[..n_w].to_vec()).unwrap(),
                bias: flat[n_w..].to_vec(),
                activation,
            };
            let out = l.apply(&input).unwrap().out;
            out.iter().zip(&probe).map(|(o, p)| o * p).sum()
        };
        worst = worst.max(grad_check(loss, &flat, &analytic, GRAD_CHECK_PERTURBATION)?);
    }
    Ok(worst)
}

/// Loss closure over one parameter group of a full network.
fn check_group<L>(
    params: &ModelParameters,
    group: ParamGroup,
    analytic: &[f64],
    loss: L,
) -> Result<f64>
where
    L: Fn(&ModelParameters) -> f64,
{
    let flat = params.group_flat(group);
    let closure = |flat_params: &[f64]| {
        let mut p = params.clone();
        p.set_group_flat(group, flat_params).unwrap();
        loss(&p)
    };
    grad_check(closure, &flat, analytic, GRAD_CHECK_PERTURBATION)
}

/// Target-network loss and analytic grads for one instance.
fn target_case(
    params: &ModelParameters,
    instance: &Instance,
    label: &WeakLabel,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let rep = representation_forward(params, instance, 0.0, Mode::Eval, &mut rng)?;
    let (pred, stack) = supervision_forward(params, rep.output(), 0.0, Mode::Eval, &mut rng)?;
    let loss = task_loss(&pred, label)?;
    let delta = task_logit_delta(&pred, label)?;
    let mut sup = zero_grads(params, ParamGroup::Supervision);
    let mut rep_grads = zero_grads(params, ParamGroup::Representation);
    target_backward(params, &rep, &stack, &delta, &mut sup, &mut rep_grads);
    Ok((loss, sup.flat(), rep_grads.flat()))
}

/// Confidence-network loss and analytic grads for one instance.
fn confidence_case(
    params: &ModelParameters,
    instance: &Instance,
    weak: &WeakLabel,
    target: f64,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let rep = representation_forward(params, instance, 0.0, Mode::Eval, &mut rng)?;
    let (c, stack) = confidence_forward(params, rep.output(), weak, 0.0, Mode::Eval, &mut rng)?;
    let loss = crate::tensor::binary_cross_entropy(target, c);
    let delta = crate::tensor::bce_logit_delta(target, c);
    let mut conf = zero_grads(params, ParamGroup::Confidence);
    let mut rep_grads = zero_grads(params, ParamGroup::Representation);
    confidence_backward(params, &rep, &stack, delta, &mut conf, &mut rep_grads);
    Ok((loss, conf.flat(), rep_grads.flat()))
}

fn check_network(task: Task, draws: usize, base_seed: u64) -> Result<[f64; 4]> {
    // [supervision-path sup grads, supervision-path rep grads,
    //  confidence-path conf grads, confidence-path rep grads]
    let vocab = tiny_vocab();
    let dims = small_dims();
    let mut worst = [0.0f64; 4];
    for draw in 0..draws {
        let (params, instance, label, seed) = {
            let mut salt = 0u64;
            loop {
                let seed = base_seed + draw as u64 + salt * 7919;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
                let params = init_parameters(task, &dims, &vocab, seed, None, None)?;
                let (instance, label) = match task {
                    Task::Ranking => (
                        Instance::Rank(rank_instance(&mut rng)),
                        WeakLabel::Scalar(rng.random_range(0.0..=1.0)),
                    ),
                    Task::Sentiment => (
                        Instance::Sentence(sentence_instance(&mut rng)),
                        WeakLabel::Distribution(random_distribution(&mut rng, 3)),
                    ),
                };
                if case_is_smooth(&params, &instance, &label)? {
                    break (params, instance, label, seed);
                }
                salt += 1;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31) ^ 0xc0ffee);

        let (_, sup_flat, rep_flat) = target_case(&params, &instance, &label)?;
        let target_loss_of = |p: &ModelParameters| target_case(p, &instance, &label).unwrap().0;
        worst[0] = worst[0].max(check_group(
            &params,
            ParamGroup::Supervision,
            &sup_flat,
            target_loss_of,
        )?);
        worst[1] = worst[1].max(check_group(
            &params,
            ParamGroup::Representation,
            &rep_flat,
            target_loss_of,
        )?);

        let c_target = rng.random_range(0.0..=1.0);
        let (_, conf_flat, rep_flat) = confidence_case(&params, &instance, &label, c_target)?;
        let conf_loss_of =
            |p: &ModelParameters| confidence_case(p, &instance, &label, c_target).unwrap().0;
        worst[2] = worst[2].max(check_group(
            &params,
            ParamGroup::Confidence,
            &conf_flat,
            conf_loss_of,
        )?);
        worst[3] = worst[3].max(check_group(
            &params,
            ParamGroup::Representation,
            &rep_flat,
            conf_loss_of,
        )?);
    }
    Ok(worst)
}

/// Run the whole verification suite: every layer type plus the composed
/// target and confidence networks for both tasks.
///
/// `inject_fault` doubles one analytic gradient coordinate in a probe check,
/// which must push that check over the threshold; it exists to prove the
/// harness can fail.
pub fn gradient_check_suite(draws: usize, inject_fault: bool) -> Result<Vec<GradCheckReport>> {
    let mut reports = Vec::new();
    let mut push = |name: &str, err: f64| {
        reports.push(GradCheckReport {
            name: name.to_string(),
            max_rel_error: err,
        });
    };

    push("dense_relu", check_dense(Activation::Relu, draws, 100)?);
    push(
        "dense_sigmoid",
        check_dense(Activation::Sigmoid, draws, 200)?,
    );
    push(
        "dense_softmax",
        check_dense(Activation::Softmax, draws, 300)?,
    );
    push(
        "dense_identity",
        check_dense(Activation::Identity, draws, 400)?,
    );

    let rank = check_network(Task::Ranking, draws, 500)?;
    push("ranking_target_supervision", rank[0]);
    push("ranking_target_representation", rank[1]);
    push("ranking_confidence_head", rank[2]);
    push("ranking_confidence_representation", rank[3]);

    let sent = check_network(Task::Sentiment, draws, 600)?;
    push("sentiment_target_supervision", sent[0]);
    push("sentiment_target_representation", sent[1]);
    push("sentiment_confidence_head", sent[2]);
    push("sentiment_confidence_representation", sent[3]);

    if inject_fault {
        // corrupt a fresh copy of the first dense check
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let layer = DenseLayer::init(3, 3, Activation::Relu, &mut rng);
        let input: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cache = layer.apply(&input)?;
        let (grads, _) = layer.backward(&input, &cache, &[1.0, 1.0, 1.0]);
        let mut analytic = grads.weights.clone();
        analytic.extend(grads.bias.iter());
        analytic[0] = analytic[0] * 2.0 + 1.0;
        let mut flat = layer.weights.values().to_vec();
        flat.extend(layer.bias.iter());
        let loss = |flat_params: &[f64]| {
            let l = DenseLayer {
                weights: Matrix::from_vec(3, 3, flat_params[..9].to_vec()).unwrap(),
                bias: flat_params[9..].to_vec(),
                activation: Activation::Relu,
            };
            l.apply(&input).unwrap().out.iter().sum()
        };
        let err = grad_check(loss, &flat, &analytic, GRAD_CHECK_PERTURBATION)?;
        push("injected_fault", err);
    }

    Ok(reports)
}
