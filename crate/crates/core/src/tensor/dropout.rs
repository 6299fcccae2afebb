//! Inverted dropout: scaling happens at train time so eval is the identity.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether stochastic layers are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Train,
    Eval,
}

/// The survivor mask with the 1/(1-rate) scaling folded in; empty in eval
/// mode or at rate 0.
#[derive(Debug, Clone)]
pub struct DropoutMask {
    scale: Vec<f64>,
}

impl DropoutMask {
    /// Identity mask (eval mode or rate 0).
    pub fn identity() -> Self {
        Self { scale: Vec::new() }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        if self.scale.is_empty() {
            v.to_vec()
        } else {
            v.iter().zip(&self.scale).map(|(x, s)| x * s).collect()
        }
    }

    /// Dropout backward is the same mask applied to the upstream gradient.
    pub fn backward(&self, grad: &[f64]) -> Vec<f64> {
        self.apply(grad)
    }
}

/// Draw a dropout mask for a vector of `len` entries.
pub fn dropout_mask<R: Rng>(len: usize, rate: f64, mode: Mode, rng: &mut R) -> Result<DropoutMask> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Config(format!("dropout rate {rate} outside [0, 1)")));
    }
    if mode == Mode::Eval || rate == 0.0 {
        return Ok(DropoutMask::identity());
    }
    let keep = 1.0 - rate;
    let scale = (0..len)
        .map(|_| {
            if rng.random::<f64>() < rate {
                0.0
            } else {
                1.0 / keep
            }
        })
        .collect();
    Ok(DropoutMask { scale })
}

/// Apply dropout to `input`, returning the output and the mask used.
pub fn dropout_apply<R: Rng>(
    input: &[f64],
    rate: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<(Vec<f64>, DropoutMask)> {
    let mask = dropout_mask(input.len(), rate, mode, rng)?;
    let out = mask.apply(input);
    Ok((out, mask))
}
