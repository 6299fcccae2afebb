//! Alternating full/weak supervision training with confidence-weighted
//! gradient updates, every baseline strategy, and the samplers and step
//! primitives underneath them.
//!
//! Weak steps scale each instance's gradient contribution by the confidence
//! network's score for it; the scores are constants in that pass. Full steps
//! train the confidence network against targets derived from the gap
//! between true and weak labels. Mode isolation holds throughout: weak
//! steps never touch the confidence group, confidence-loss full steps never
//! touch the supervision group.

pub mod config;
pub mod engine;
pub mod nli;
pub mod sampler;
pub mod sets;
pub mod steps;
pub mod strategies;

pub use config::{Alternation, Strategy, TrainConfig, ALL_STRATEGIES};
pub use engine::{train, EvalFn, FullPhase, TrainOutcome};
pub use nli::{relabel_weak_set, NliGenerator};
pub use sampler::{sample_full_batch, EpochSampler};
pub use sets::{CurveRecord, FullExample, LabeledSets, StepMode, TrainStepReport, WeakExample};
pub use steps::{
    compute_confidences, full_step, true_label_step, weak_batch_gradients, weak_step,
    ConfidenceSource,
};
pub use strategies::{
    full_phase_steps, phase_seed, planned_weak_batches, run_strategy, ModelSpec, Predictor,
    StrategyOutcome,
};
