//! Randomized decision rules and the error rates they induce.

use serde::{Deserialize, Serialize};

use crate::distributions::{ContinuousDistribution, SignalModel};
use crate::error::{Error, Result};

/// Probability of a favorable decision as a piecewise-constant function of
/// the signal.
///
/// JSON literal: `{"two_piece": {"s": .., "a": .., "b": ..}}` or
/// `{"tabulated": {"breaks": [..], "values": [..]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRule {
    /// Accept with probability `a` below `s` and `b` at or above it.
    TwoPiece { s: f64, a: f64, b: f64 },
    /// `values[0]` applies below `breaks[0]`, `values[k]` on
    /// `[breaks[k-1], breaks[k])`, and the last value from the last break on.
    Tabulated { breaks: Vec<f64>, values: Vec<f64> },
}

impl DecisionRule {
    pub fn accept_all() -> Self {
        DecisionRule::TwoPiece { s: 0.0, a: 1.0, b: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let probability = |v: f64| (0.0..=1.0).contains(&v);
        match self {
            DecisionRule::TwoPiece { s, a, b } => {
                if !s.is_finite() {
                    return Err(Error::InvalidRule(format!("threshold {s} is not finite")));
                }
                if !probability(*a) || !probability(*b) {
                    return Err(Error::InvalidRule(format!("acceptance probabilities ({a}, {b}) outside [0, 1]")));
                }
            }
            DecisionRule::Tabulated { breaks, values } => {
                if values.len() != breaks.len() + 1 {
                    return Err(Error::InvalidRule(format!(
                        "{} breaks need {} values, got {}",
                        breaks.len(),
                        breaks.len() + 1,
                        values.len()
                    )));
                }
                if breaks.iter().any(|x| !x.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidRule("breaks must be finite and strictly increasing".into()));
                }
                if let Some(v) = values.iter().find(|&&v| !probability(v)) {
                    return Err(Error::InvalidRule(format!("acceptance probability {v} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }

    /// `δ(s)`.
    pub fn acceptance(&self, signal: f64) -> f64 {
        match self {
            DecisionRule::TwoPiece { s, a, b } => {
                if signal < *s {
                    *a
                } else {
                    *b
                }
            }
            DecisionRule::Tabulated { breaks, values } => values[breaks.partition_point(|&x| x <= signal)],
        }
    }

    /// `E[δ(s)]` under a signal distribution, summed exactly over the pieces.
    pub fn expected_acceptance(&self, dist: &ContinuousDistribution) -> f64 {
        match self {
            DecisionRule::TwoPiece { a, b, .. } if a == b => *a,
            DecisionRule::Tabulated { values, .. } if values.iter().all(|v| *v == values[0]) => values[0],
            DecisionRule::TwoPiece { s, a, b } => {
                let below = dist.cdf(*s);
                a * below + b * (1.0 - below)
            }
            DecisionRule::Tabulated { breaks, values } => {
                let mut prev = 0.0;
                let mut total = 0.0;
                for (&x, &v) in breaks.iter().zip(values) {
                    let f = dist.cdf(x);
                    total += v * (f - prev);
                    prev = f;
                }
                total += values[values.len() - 1] * (1.0 - prev);
                total.clamp(0.0, 1.0)
            }
        }
    }
}

/// True and false positive rates of a rule for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub tpr: f64,
    pub fpr: f64,
}

impl ErrorProfile {
    pub fn new(tpr: f64, fpr: f64) -> Self {
        ErrorProfile { tpr, fpr }
    }

    pub fn is_informative(&self) -> bool {
        informativeness(self) > 0.0
    }
}

/// `tpr - fpr`.
pub fn informativeness(profile: &ErrorProfile) -> f64 {
    profile.tpr - profile.fpr
}

/// Error rates of `rule` under `model`.
///
/// A two-piece rule whose threshold sits outside the signal support
/// (`F1(s) = 0` or `F0(s) = 1`) is reported as a [`Error::SupportViolation`]
/// unless the rule is constant, in which case the threshold is irrelevant.
pub fn error_profile(rule: &DecisionRule, model: &SignalModel) -> Result<ErrorProfile> {
    rule.validate()?;
    if let DecisionRule::TwoPiece { s, a, b } = rule {
        if a != b {
            let f1 = model.f1.cdf(*s);
            let f0 = model.f0.cdf(*s);
            if f1 <= 0.0 || f0 >= 1.0 {
                return Err(Error::SupportViolation { threshold: *s, f1, f0 });
            }
        }
    }
    Ok(ErrorProfile { tpr: rule.expected_acceptance(&model.f1), fpr: rule.expected_acceptance(&model.f0) })
}
