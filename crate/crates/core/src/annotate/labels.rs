//! Weak labels and confidence-network training targets.

use crate::error::{Error, Result};

/// A label produced by a weak annotator: a scalar preference probability for
/// ranking, or a class distribution for classification.
#[derive(Debug, Clone, PartialEq)]
pub enum WeakLabel {
    Scalar(f64),
    Distribution(Vec<f64>),
}

impl WeakLabel {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeakLabel::Scalar(p) => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Validation(format!(
                        "scalar weak label {p} outside [0, 1]"
                    )));
                }
            }
            WeakLabel::Distribution(d) => {
                if d.iter().any(|&x| x < 0.0) {
                    return Err(Error::Validation("negative mass in weak label".into()));
                }
                let sum: f64 = d.iter().sum();
                if (sum - 1.0).abs() > 1e-6 {
                    return Err(Error::Validation(format!("weak label sums to {sum}")));
                }
            }
        }
        Ok(())
    }

    /// Width when concatenated onto a representation vector.
    pub fn width(&self) -> usize {
        match self {
            WeakLabel::Scalar(_) => 1,
            WeakLabel::Distribution(d) => d.len(),
        }
    }

    pub fn as_vec(&self) -> Vec<f64> {
        match self {
            WeakLabel::Scalar(p) => vec![*p],
            WeakLabel::Distribution(d) => d.clone(),
        }
    }
}

/// Training target for the confidence network, always in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceTarget(pub f64);

/// Preference probability that the first document ranks higher, from two
/// non-negative annotator scores: s+ / (s+ + s-), with 0.5 when both are 0.
pub fn pairwise_weak_label(s_pos: f64, s_neg: f64) -> Result<WeakLabel> {
    if s_pos < 0.0 || s_neg < 0.0 || !s_pos.is_finite() || !s_neg.is_finite() {
        return Err(Error::Validation(format!(
            "pairwise scores must be finite and non-negative, got ({s_pos}, {s_neg})"
        )));
    }
    let total = s_pos + s_neg;
    let p = if total == 0.0 { 0.5 } else { s_pos / total };
    Ok(WeakLabel::Scalar(p))
}

/// Ranking confidence target: 1 - |y - y~|.
pub fn confidence_target_rank(true_label: f64, weak_label: f64) -> Result<ConfidenceTarget> {
    for (name, v) in [("true", true_label), ("weak", weak_label)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Validation(format!(
                "{name} label {v} outside [0, 1]"
            )));
        }
    }
    Ok(ConfidenceTarget(1.0 - (true_label - weak_label).abs()))
}

/// Classification confidence target: 1 - mean_k |y_k - y~_k|, clamped into
/// [0, 1].
pub fn confidence_target_class(true_dist: &[f64], weak_dist: &[f64]) -> Result<ConfidenceTarget> {
    if true_dist.len() != weak_dist.len() {
        return Err(Error::Shape(format!(
            "true label over {} classes, weak over {}",
            true_dist.len(),
            weak_dist.len()
        )));
    }
    if true_dist.is_empty() {
        return Err(Error::Shape("empty class distributions".into()));
    }
    let mean_abs: f64 = true_dist
        .iter()
        .zip(weak_dist)
        .map(|(&a, &b)| (a - b).abs())
        .sum::<f64>()
        / true_dist.len() as f64;
    Ok(ConfidenceTarget((1.0 - mean_abs).clamp(0.0, 1.0)))
}
