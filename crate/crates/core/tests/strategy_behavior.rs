//! Behavioral checks on step primitives and the label-generator baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cws_core::annotate::labels::{ConfidenceTarget, WeakLabel};
use cws_core::annotate::pairwise_weak_label;
use cws_core::data::{build_rank_sets, gen_synth_ranking, RankSetOptions, RankingSynthSpec, Vocabulary};
use cws_core::model::{
    init_parameters, Instance, NetworkDims, ParamGroup, SentenceInstance, Task,
};
use cws_core::train::{
    full_step, FullExample, LabeledSets, NliGenerator, Strategy, TrainConfig, WeakExample,
};

fn small_dims() -> NetworkDims {
    NetworkDims {
        embedding_dim: 4,
        conv_filters: 3,
        conv_window: 2,
        supervision_hidden: vec![6],
        confidence_hidden: vec![6],
    }
}

fn vocab(n: usize) -> Vocabulary {
    let mut v = Vocabulary::new();
    for i in 0..n {
        v.intern(&format!("w{i}"));
    }
    v
}

#[test]
fn perfect_confidence_head_sits_at_the_entropy_floor_with_zero_gradient() {
    // rig the head to output a constant c exactly: zero weights everywhere,
    // output bias at the logit of c; with every target equal to c the loss is
    // the entropy of c and no parameter moves
    let v = vocab(12);
    for &c_target in &[0.3f64, 0.5, 0.8] {
        let mut params = init_parameters(Task::Sentiment, &small_dims(), &v, 3, None, None).unwrap();
        for layer in &mut params.confidence {
            for w in layer.weights.values_mut().iter_mut() {
                *w = 0.0;
            }
            for b in layer.bias.iter_mut() {
                *b = 0.0;
            }
        }
        let logit = (c_target / (1.0 - c_target)).ln();
        let last = params.confidence.len() - 1;
        params.confidence[last].bias[0] = logit;

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batch: Vec<FullExample> = (0..6)
            .map(|_| {
                let len = rng.random_range(2..6);
                let tokens: Vec<u32> = (0..len).map(|_| rng.random_range(2..14)).collect();
                let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..1.0)).collect();
                let sum: f64 = raw.iter().sum();
                FullExample {
                    instance: Instance::Sentence(SentenceInstance::padded(tokens, 2).unwrap()),
                    weak: WeakLabel::Distribution(raw.iter().map(|x| x / sum).collect()),
                    truth: WeakLabel::Distribution(vec![1.0, 0.0, 0.0]),
                    confidence: ConfidenceTarget(c_target),
                }
            })
            .collect();
        let refs: Vec<&FullExample> = batch.iter().collect();

        let before_conf = params.group_flat(ParamGroup::Confidence);
        let before_rep = params.group_flat(ParamGroup::Representation);
        let config = TrainConfig::for_task(Task::Sentiment, Strategy::CwsJt, 1);
        let mut step_rng = ChaCha8Rng::seed_from_u64(2);
        let report = full_step(&mut params, &refs, &config, false, &mut step_rng, 1).unwrap();

        let entropy = -c_target * c_target.ln() - (1.0 - c_target) * (1.0 - c_target).ln();
        assert!(
            (report.loss - entropy).abs() < 1e-9,
            "c = {c_target}: loss {} vs entropy {entropy}",
            report.loss
        );
        // the logit delta vanishes up to the sigmoid/logit round-trip, so
        // the update is negligible
        for (after, before) in params
            .group_flat(ParamGroup::Confidence)
            .iter()
            .chain(params.group_flat(ParamGroup::Representation).iter())
            .zip(before_conf.iter().chain(before_rep.iter()))
        {
            assert!((after - before).abs() < 1e-9, "{after} vs {before}");
        }
    }
}

#[test]
fn label_generator_reproduces_weak_labels_when_they_are_already_true() {
    // a full set where the weak label equals the one-hot truth: the
    // generator sees the answer in its input and must learn to echo it
    let v = vocab(30);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut make = |class: usize| -> (Instance, WeakLabel) {
        let len = rng.random_range(3..8);
        let tokens: Vec<u32> = (0..len).map(|_| rng.random_range(2..32)).collect();
        let mut dist = vec![0.0; 3];
        dist[class] = 1.0;
        (
            Instance::Sentence(SentenceInstance::padded(tokens, 2).unwrap()),
            WeakLabel::Distribution(dist),
        )
    };
    let full: Vec<FullExample> = (0..120)
        .map(|i| {
            let (instance, label) = make(i % 3);
            FullExample {
                instance,
                weak: label.clone(),
                truth: label,
                confidence: ConfidenceTarget(1.0),
            }
        })
        .collect();
    let weak: Vec<WeakExample> = (0..200)
        .map(|i| {
            let (instance, label) = make((i + 1) % 3);
            WeakExample { instance, weak: label }
        })
        .collect();
    let sets = LabeledSets { weak: weak.clone(), full };

    let dims = small_dims();
    let params = init_parameters(Task::Sentiment, &dims, &v, 11, None, None).unwrap();
    let mut generator = NliGenerator::new(params, &[8], 7);
    let mut config = TrainConfig::for_task(Task::Sentiment, Strategy::Nli, 11);
    config.lr = 3e-3;
    config.batch_full = 16;
    generator.train(&sets, &config, 400).unwrap();

    let relabeled = generator.generate(&weak).unwrap();
    let mut worst: f64 = 0.0;
    for (orig, new) in weak.iter().zip(&relabeled) {
        let (WeakLabel::Distribution(a), WeakLabel::Distribution(b)) = (&orig.weak, &new.weak)
        else {
            panic!()
        };
        // regenerated labels stay normalized
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        for (x, y) in a.iter().zip(b) {
            worst = worst.max((x - y).abs());
        }
    }
    assert!(worst <= 0.05, "relabeled labels stray {worst:.4} from the originals");
}

#[test]
fn annotator_pairwise_accuracy_is_weak_but_informative_on_the_default_task() {
    // frozen regression fixture: over the full-set pairs of the default
    // synthetic ranking task, the annotator's preference agrees with the
    // true preference more often than chance and less often than always
    let spec = RankingSynthSpec::default();
    let corpus = gen_synth_ranking(&spec).unwrap();
    let index = cws_core::annotate::build_index(&corpus.documents).unwrap();
    let built = build_rank_sets(&corpus, &index, &RankSetOptions::default()).unwrap();

    let mut agree = 0usize;
    let mut total = 0usize;
    for ex in &built.sets.full {
        let (WeakLabel::Scalar(weak), WeakLabel::Scalar(truth)) = (&ex.weak, &ex.truth) else {
            panic!()
        };
        // ties in the weak preference count as half agreement
        if (*weak - 0.5).abs() < 1e-12 {
            total += 2;
            agree += 1;
        } else {
            total += 2;
            if (*weak > 0.5) == (*truth > 0.5) {
                agree += 2;
            }
        }
    }
    let accuracy = agree as f64 / total as f64;
    assert!(
        accuracy > 0.5 && accuracy < 1.0,
        "annotator pairwise accuracy {accuracy:.4} outside (0.5, 1.0)"
    );
    // frozen band from the first verified run; the exact value is pinned by
    // the deterministic generator
    assert!(
        (0.6..=0.98).contains(&accuracy),
        "accuracy {accuracy:.4} drifted out of the regression band"
    );

    // the scores behind the preferences are plain annotator output
    let WeakLabel::Scalar(p) = pairwise_weak_label(3.0, 1.0).unwrap() else { panic!() };
    assert!((p - 0.75).abs() < 1e-12);
}
