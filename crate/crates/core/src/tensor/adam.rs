//! Adam optimizer with bias correction.

use crate::error::{Error, Result};

pub const DEFAULT_BETA1: f64 = 0.9;
pub const DEFAULT_BETA2: f64 = 0.999;
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Moment state for one parameter group. The moment buffers parallel the
/// group's tensor list, in the same fixed order as the parameters.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl AdamState {
    /// Zero-initialized moments for tensors of the given lengths.
    pub fn new(shapes: &[usize]) -> Self {
        Self {
            step: 0,
            beta1: DEFAULT_BETA1,
            beta2: DEFAULT_BETA2,
            epsilon: DEFAULT_EPSILON,
            first_moment: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second_moment: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// One Adam update over a parameter group. `params` and `grads` must
    /// parallel the moment buffers. The step counter advances exactly once.
    pub fn update(
        &mut self,
        params: &mut [&mut Vec<f64>],
        grads: &[&[f64]],
        lr: f64,
    ) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != self.first_moment.len() {
            return Err(Error::Shape(format!(
                "adam state tracks {} tensors, got {} params / {} grads",
                self.first_moment.len(),
                params.len(),
                grads.len()
            )));
        }
        for ((p, g), (m, v)) in params
            .iter()
            .zip(grads)
            .zip(self.first_moment.iter().zip(&self.second_moment))
        {
            if p.len() != m.len() || g.len() != m.len() {
                return Err(Error::Shape(format!(
                    "adam tensor of {} entries got {} params / {} grads",
                    m.len(),
                    p.len(),
                    g.len()
                )));
            }
            let _ = v;
        }
        self.step += 1;
        let t = self.step as f64;
        let bias1 = 1.0 - self.beta1.powf(t);
        let bias2 = 1.0 - self.beta2.powf(t);
        for ((p, g), (m, v)) in params.iter_mut().zip(grads).zip(
            self.first_moment
                .iter_mut()
                .zip(self.second_moment.iter_mut()),
        ) {
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let m_hat = m[i] / bias1;
                let v_hat = v[i] / bias2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}
