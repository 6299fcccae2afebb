//! Training sets and per-step reports.

use crate::annotate::labels::{ConfidenceTarget, WeakLabel};
use crate::error::{Error, Result};
use crate::model::Instance;

/// One weakly annotated example (a member of the large set usually called U).
#[derive(Debug, Clone)]
pub struct WeakExample {
    pub instance: Instance,
    pub weak: WeakLabel,
}

/// One example carrying a weak label, a true label, and the precomputed
/// confidence target (a member of the small set usually called V).
#[derive(Debug, Clone)]
pub struct FullExample {
    pub instance: Instance,
    pub weak: WeakLabel,
    pub truth: WeakLabel,
    pub confidence: ConfidenceTarget,
}

/// The two training pools.
#[derive(Debug, Clone, Default)]
pub struct LabeledSets {
    pub weak: Vec<WeakExample>,
    pub full: Vec<FullExample>,
}

impl LabeledSets {
    pub fn validate(&self) -> Result<()> {
        for ex in &self.full {
            if !(0.0..=1.0).contains(&ex.confidence.0) {
                return Err(Error::Validation(format!(
                    "confidence target {} outside [0, 1]",
                    ex.confidence.0
                )));
            }
        }
        Ok(())
    }
}

/// Supervision mode of one training step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    Weak,
    Full,
}

/// What one optimizer step saw: the mode's loss, the mean confidence of the
/// batch, and the running batch index.
#[derive(Debug, Clone)]
pub struct TrainStepReport {
    pub mode: StepMode,
    /// Weighted task loss (weak mode) or confidence loss (full mode).
    pub loss: f64,
    /// Unweighted task loss of the same weak batch; None in full mode.
    pub loss_unweighted: Option<f64>,
    pub mean_confidence: f64,
    pub batch_index: usize,
}

/// One checkpoint row for learning-curve emission.
#[derive(Debug, Clone)]
pub struct CurveRecord {
    /// Number of weak batches consumed when the checkpoint was taken.
    pub weak_batch: usize,
    /// "train" or "test".
    pub split: String,
    /// Mean weighted task loss since the previous checkpoint.
    pub loss_t: Option<f64>,
    /// Mean confidence loss since the previous checkpoint.
    pub loss_c: Option<f64>,
    /// Mean unweighted task loss since the previous checkpoint.
    pub loss_wso: Option<f64>,
    /// Test metric at the checkpoint.
    pub metric_test: Option<f64>,
}
