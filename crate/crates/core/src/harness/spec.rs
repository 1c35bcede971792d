use serde::{Deserialize, Serialize};

use crate::error::{QbcError, Result};
use crate::protocols::{Intent, ProtocolConfig, StrategyRef};

/// Default trial count when a spec does not give one.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Largest trial count accepted.
pub const MAX_TRIALS: u64 = 100_000_000;

/// Quantities an experiment can estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Babe accepts Adam's opening for his strategy's own intent.
    Accept,
    /// Babe's commit-time guess equals the committed bit.
    BabeGuess,
    AdamSameBit,
    AdamBitChange,
    AdamMatching,
}

impl Metric {
    pub const ALL: [Metric; 5] =
        [Metric::Accept, Metric::BabeGuess, Metric::AdamSameBit, Metric::AdamBitChange, Metric::AdamMatching];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accept => "accept",
            Metric::BabeGuess => "babe_guess",
            Metric::AdamSameBit => "adam_same_bit",
            Metric::AdamBitChange => "adam_bit_change",
            Metric::AdamMatching => "adam_matching",
        }
    }

    pub fn intent(self) -> Option<Intent> {
        match self {
            Metric::AdamSameBit => Some(Intent::Same),
            Metric::AdamBitChange => Some(Intent::Change),
            Metric::AdamMatching => Some(Intent::Matching),
            _ => None,
        }
    }
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ExperimentSpec {
    pub protocol: ProtocolConfig,
    #[serde(default = "honest")]
    pub adam_strategy: StrategyRef,
    #[serde(default = "honest")]
    pub babe_strategy: StrategyRef,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Metrics to estimate. Absent: a default set for the strategies; an
    /// empty list: predictions only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<Metric>>,
    /// Per-qubit cheating probability to compare the bit-change rate with.
    #[serde(default, rename = "pA", skip_serializing_if = "Option::is_none")]
    pub p_a: Option<f64>,
}

fn honest() -> StrategyRef {
    StrategyRef::new("honest")
}

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

impl ExperimentSpec {
    pub fn new(protocol: ProtocolConfig) -> Self {
        ExperimentSpec {
            protocol,
            adam_strategy: honest(),
            babe_strategy: honest(),
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            outputs: None,
            p_a: None,
        }
    }

    pub fn with_adam(mut self, r: StrategyRef) -> Self {
        self.adam_strategy = r;
        self
    }

    pub fn with_babe(mut self, r: StrategyRef) -> Self {
        self.babe_strategy = r;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_outputs(mut self, outputs: Vec<Metric>) -> Self {
        self.outputs = Some(outputs);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        if self.trials < 1 {
            return Err(QbcError::Config("trials must be at least 1".into()));
        }
        if self.trials > MAX_TRIALS {
            return Err(QbcError::Config(format!("trials {} above the cap {MAX_TRIALS}", self.trials)));
        }
        if let Some(p) = self.p_a {
            if !(0.0..=1.0).contains(&p) {
                return Err(QbcError::Config(format!("pA = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_spec() {
        let s: ExperimentSpec = serde_json::from_str(r#"{"protocol":{"kind":"QBCp3m","n":3}}"#).unwrap();
        assert_eq!(s.trials, DEFAULT_TRIALS);
        assert_eq!(s.adam_strategy.id, "honest");
        assert!(s.outputs.is_none());
        let s: ExperimentSpec = serde_json::from_str(
            r#"{"protocol":{"kind":"QBCp3m","n":3},"outputs":["babe_guess"],"babeStrategy":{"id":"majority"},"pA":0.85}"#,
        )
        .unwrap();
        assert_eq!(s.outputs, Some(vec![Metric::BabeGuess]));
        assert_eq!(s.p_a, Some(0.85));
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"protocol":{"kind":"QBCp3m"},"seed":1}"#).is_err());
    }

    #[test]
    fn trial_caps() {
        let s = ExperimentSpec::new(ProtocolConfig::qbcp3m(3));
        assert!(s.clone().with_trials(0).validate().is_err());
        assert!(s.clone().with_trials(MAX_TRIALS + 1).validate().is_err());
        s.with_trials(MAX_TRIALS).validate().unwrap();
    }
}
