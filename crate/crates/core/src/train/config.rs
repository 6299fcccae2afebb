//! Training strategies and configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Task;

/// Every supported training strategy and baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// The weak annotator itself, no training.
    Wa,
    /// Weak supervision only.
    Wso,
    /// Full supervision only.
    Fso,
    /// Weak supervision then fine-tuning of all target-network groups.
    WsFt,
    /// Weak supervision then supervision-layer fine-tuning.
    WsSft,
    /// Weak supervision then representation fine-tuning.
    WsRft,
    /// New-label inference: a generator maps weak labels to new labels.
    Nli,
    /// Controlled weak supervision with joint training.
    CwsJt,
    /// Joint training plus true-label supervision updates.
    CwsJtPlus,
    /// Separate confidence training without representation sharing.
    CwsSt,
    /// Circular training: target, then confidence, then weighted target.
    CwsCt,
}

pub const ALL_STRATEGIES: [Strategy; 11] = [
    Strategy::Wa,
    Strategy::Wso,
    Strategy::Fso,
    Strategy::WsFt,
    Strategy::WsSft,
    Strategy::WsRft,
    Strategy::Nli,
    Strategy::CwsJt,
    Strategy::CwsJtPlus,
    Strategy::CwsSt,
    Strategy::CwsCt,
];

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Wa => "WA",
            Strategy::Wso => "WSO",
            Strategy::Fso => "FSO",
            Strategy::WsFt => "WS_FT",
            Strategy::WsSft => "WS_SFT",
            Strategy::WsRft => "WS_RFT",
            Strategy::Nli => "NLI",
            Strategy::CwsJt => "CWS_JT",
            Strategy::CwsJtPlus => "CWS_JT_PLUS",
            Strategy::CwsSt => "CWS_ST",
            Strategy::CwsCt => "CWS_CT",
        }
    }

    /// True when the strategy reads true labels from the full set.
    pub fn uses_full_set(&self) -> bool {
        !matches!(self, Strategy::Wa | Strategy::Wso)
    }

    /// True when the strategy consumes the weakly labeled set.
    pub fn uses_weak_set(&self) -> bool {
        !matches!(self, Strategy::Wa | Strategy::Fso)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_uppercase().replace(['-', '+'], "_");
        match up.as_str() {
            "WA" => Ok(Strategy::Wa),
            "WSO" => Ok(Strategy::Wso),
            "FSO" => Ok(Strategy::Fso),
            "WS_FT" | "WSFT" => Ok(Strategy::WsFt),
            "WS_SFT" | "WSSFT" => Ok(Strategy::WsSft),
            "WS_RFT" | "WSRFT" => Ok(Strategy::WsRft),
            "NLI" => Ok(Strategy::Nli),
            "CWS_JT" | "CWSJT" => Ok(Strategy::CwsJt),
            "CWS_JT_PLUS" | "CWS_JT_" => Ok(Strategy::CwsJtPlus),
            "CWS_ST" | "CWSST" => Ok(Strategy::CwsSt),
            "CWS_CT" | "CWSCT" => Ok(Strategy::CwsCt),
            "CWS_PT" | "CWSPT" => Err(Error::UnsupportedStrategy(
                "CWS_PT progressive training is not supported".into(),
            )),
            other => Err(Error::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

/// How full and weak supervision modes alternate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternation {
    /// One block of full steps after every `ratio_weak` weak batches.
    DeterministicCycle,
    /// Mode drawn per step with probability ratio_full : ratio_weak.
    Stochastic,
}

/// Knobs of one training run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub strategy: Strategy,
    /// Global learning rate.
    pub lr: f64,
    /// Weak-mode batch size.
    pub batch_weak: usize,
    /// Full-mode batch size.
    pub batch_full: usize,
    /// Full : weak alternation ratio, e.g. (1, 10).
    pub ratio_full: usize,
    pub ratio_weak: usize,
    pub alternation: Alternation,
    /// Hard cap on weak batches; the weak set ending also stops training.
    pub max_weak_batches: usize,
    /// Emit a curve record every this many weak batches.
    pub checkpoint_every: usize,
    pub dropout: f64,
    /// L2 weight folded into the target-network gradient; 0 disables it.
    pub l2_weight: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// Task defaults: weak batches of 128 (ranking) or 64 (sentiment),
    /// 1:10 full-to-weak ratio, deterministic alternation.
    pub fn for_task(task: Task, strategy: Strategy, seed: u64) -> Self {
        Self {
            strategy,
            lr: 1e-3,
            batch_weak: match task {
                Task::Ranking => 128,
                Task::Sentiment => 64,
            },
            batch_full: 32,
            ratio_full: 1,
            ratio_weak: 10,
            alternation: Alternation::DeterministicCycle,
            max_weak_batches: 400,
            checkpoint_every: 20,
            dropout: 0.0,
            l2_weight: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lr <= 0.0 {
            return Err(Error::Config(format!(
                "learning rate {} must be > 0",
                self.lr
            )));
        }
        if self.batch_weak == 0 || self.batch_full == 0 {
            return Err(Error::Config("batch sizes must be >= 1".into()));
        }
        if self.ratio_full == 0 || self.ratio_weak == 0 {
            return Err(Error::Config(
                "alternation ratio components must be >= 1".into(),
            ));
        }
        if self.max_weak_batches == 0 {
            return Err(Error::Config("max_weak_batches must be >= 1".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::Config("checkpoint_every must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if self.l2_weight < 0.0 {
            return Err(Error::Config("l2_weight must be >= 0".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_names_round_trip() {
        for s in ALL_STRATEGIES {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
    }

    #[test]
    fn cws_jt_plus_spelling_variants() {
        assert_eq!("CWS_JT+".parse::<Strategy>().unwrap(), Strategy::CwsJtPlus);
        assert_eq!(
            "cws_jt_plus".parse::<Strategy>().unwrap(),
            Strategy::CwsJtPlus
        );
    }

    #[test]
    fn progressive_training_is_rejected_as_unsupported() {
        assert!(matches!(
            "CWS_PT".parse::<Strategy>(),
            Err(Error::UnsupportedStrategy(_))
        ));
    }

    #[test]
    fn unknown_strategy_is_a_config_error() {
        assert!(matches!("NOPE".parse::<Strategy>(), Err(Error::Config(_))));
    }

    #[test]
    fn config_validation_catches_bad_values() {
        let mut c = TrainConfig::for_task(Task::Sentiment, Strategy::Wso, 1);
        assert!(c.validate().is_ok());
        c.dropout = 1.0;
        assert!(c.validate().is_err());
        c.dropout = 0.2;
        c.lr = 0.0;
        assert!(c.validate().is_err());
    }
}
