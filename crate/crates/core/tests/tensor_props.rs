//! Finiteness properties: no tensor operation emits NaN or Inf for finite
//! inputs, and clamped losses stay finite at the extremes.

use proptest::prelude::*;

use cws_core::tensor::{
    binary_cross_entropy, categorical_cross_entropy, softmax, Activation, DenseLayer, Matrix,
};

proptest! {
    #[test]
    fn dense_layers_stay_finite(
        weights in prop::collection::vec(-50.0f64..50.0, 6),
        bias in prop::collection::vec(-50.0f64..50.0, 2),
        input in prop::collection::vec(-50.0f64..50.0, 3),
        act in 0usize..4,
    ) {
        let activation = [Activation::Relu, Activation::Sigmoid, Activation::Softmax, Activation::Identity][act];
        let layer = DenseLayer {
            weights: Matrix::from_vec(2, 3, weights).unwrap(),
            bias,
            activation,
        };
        let cache = layer.apply(&input).unwrap();
        prop_assert!(cache.out.iter().all(|v| v.is_finite()));
        let (grads, grad_in) = layer.backward(&input, &cache, &[1.0, -1.0]);
        prop_assert!(grads.weights.iter().all(|v| v.is_finite()));
        prop_assert!(grad_in.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn softmax_always_normalizes(logits in prop::collection::vec(-700.0f64..700.0, 1..8)) {
        let p = softmax(&logits);
        prop_assert!(p.iter().all(|v| v.is_finite() && *v >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn losses_stay_finite_at_the_extremes(t in 0.0f64..=1.0, p in 0.0f64..=1.0) {
        prop_assert!(binary_cross_entropy(t, p).is_finite());
        let target = [t, 1.0 - t];
        let pred = [p, 1.0 - p];
        let loss = categorical_cross_entropy(&target, &pred).unwrap();
        prop_assert!(loss.is_finite());
    }
}
