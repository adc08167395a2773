//! JSON scenario files and the built-in examples.
//!
//! ```json
//! {
//!   "version": 1,
//!   "groups": [
//!     {"name": "X", "cost": {"normal": {"mean": 0, "sd": 1}},
//!      "signals": {"f0": {"normal": {"mean": 0, "sd": 1}}, "f1": {"normal": {"mean": 1, "sd": 1}}},
//!      "stakes": 0.0},
//!     {"name": "Y", "cost": {"normal": {"mean": 1, "sd": 1}},
//!      "signals": {"f0": {"normal": {"mean": 0, "sd": 1}}, "f1": {"normal": {"mean": 1, "sd": 1}}},
//!      "rewards": {"r1": 5, "r0": 2},
//!      "rule": {"two_piece": {"s": 0.5, "a": 0.28, "b": 1.0}}}
//!   ],
//!   "options": {"mode": "theorem1", "tolerance": 1e-9, "seed": 7, "n": 200000}
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::classifier::DecisionRule;
use crate::distributions::{ContinuousDistribution, SignalModel};
use crate::equilibrium::{GroupEnvironment, Stakes};
use crate::error::{Error, Result};
use crate::fairness::DEFAULT_TOLERANCE;
use crate::mechanism::{run_mechanism, MechanismDesign, MechanismOptions, Mode};
use crate::GROUP_COUNT;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rewards {
    pub r1: f64,
    pub r0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub name: String,
    pub cost: ContinuousDistribution,
    pub signals: SignalModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stakes: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewards: Option<Rewards>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<DecisionRule>,
}

impl GroupSpec {
    /// Net stakes, from either `stakes` or `rewards`.
    pub fn net_stakes(&self) -> Option<Stakes> {
        match (self.stakes, self.rewards) {
            (Some(r), _) => Some(Stakes(r)),
            (None, Some(Rewards { r1, r0 })) => Some(Stakes::from_rewards(r1, r0)),
            (None, None) => None,
        }
    }

    pub fn environment(&self) -> GroupEnvironment {
        GroupEnvironment {
            name: self.name.clone(),
            cost: self.cost.clone(),
            signals: self.signals.clone(),
            stakes: self.net_stakes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub base_reward: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_population")]
    pub n: usize,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_population() -> usize {
    200_000
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { mode: None, tolerance: DEFAULT_TOLERANCE, base_reward: 0.0, seed: 0, n: default_population() }
    }
}

impl RunOptions {
    pub fn mechanism_options(&self) -> MechanismOptions {
        MechanismOptions { tolerance: self.tolerance, base_reward: self.base_reward }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub groups: Vec<GroupSpec>,
    #[serde(default)]
    pub options: RunOptions,
}

impl Scenario {
    /// Parses and validates. Syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::InvalidScenario(format!(
                "unsupported version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        if self.groups.len() != GROUP_COUNT {
            return Err(Error::InvalidScenario(format!(
                "exactly {GROUP_COUNT} groups required, found {}",
                self.groups.len()
            )));
        }
        if self.groups[0].name == self.groups[1].name {
            return Err(Error::InvalidScenario(format!("duplicate group name {:?}", self.groups[0].name)));
        }
        for g in &self.groups {
            if g.name.trim().is_empty() {
                return Err(Error::InvalidScenario("group name must be non-empty".into()));
            }
            g.cost.validate()?;
            g.signals.f0.validate()?;
            g.signals.f1.validate()?;
            if g.stakes.is_some() && g.rewards.is_some() {
                return Err(Error::InvalidScenario(format!(
                    "group {}: give either stakes or rewards, not both",
                    g.name
                )));
            }
            if let Some(s) = g.net_stakes() {
                if !s.0.is_finite() {
                    return Err(Error::InvalidScenario(format!("group {}: stakes must be finite", g.name)));
                }
            }
            if let Some(rule) = &g.rule {
                rule.validate()?;
            }
        }
        if self.options.tolerance.is_nan() || self.options.tolerance < 0.0 {
            return Err(Error::InvalidScenario("tolerance must be non-negative".into()));
        }
        Ok(())
    }

    pub fn environments(&self) -> [GroupEnvironment; 2] {
        [self.groups[0].environment(), self.groups[1].environment()]
    }

    /// Explicit rules, if every group has one.
    pub fn rules(&self) -> Option<[DecisionRule; 2]> {
        Some([self.groups[0].rule.clone()?, self.groups[1].rule.clone()?])
    }

    /// Explicit stakes, if every group has them.
    pub fn stakes(&self) -> Option<[Stakes; 2]> {
        Some([self.groups[0].net_stakes()?, self.groups[1].net_stakes()?])
    }

    pub fn mode(&self) -> Mode {
        self.options.mode.unwrap_or(Mode::Theorem1)
    }

    pub fn run(&self, mode: Mode) -> Result<MechanismDesign> {
        let [x, y] = self.environments();
        run_mechanism(&x, &y, mode, &self.options.mechanism_options())
    }

    /// Copy of this scenario with the design's rules and stakes written in,
    /// ready for an audit.
    pub fn with_design(&self, design: &MechanismDesign) -> Scenario {
        let mut out = self.clone();
        for (g, (rule, stakes)) in out.groups.iter_mut().zip(design.rules().into_iter().zip(design.stakes)) {
            g.rule = Some(rule);
            g.stakes = Some(stakes.0);
            g.rewards = None;
        }
        out
    }

    /// Built-in scenarios for examples 1-3. Both groups use signals
    /// `f0 = N(0, 1)`, `f1 = N(1, 1)`.
    pub fn example(id: u8) -> Result<Scenario> {
        let (x_cost, y_cost, mode) = match id {
            1 => ((0.0, 1.0), (1.0, 1.0), Mode::Theorem1),
            2 => ((0.0, 2.0), (1.0, 1.0), Mode::EqualStakes),
            3 => ((0.0, 2.0), (-1.0, 1.0), Mode::EqualStakes),
            other => return Err(Error::InvalidScenario(format!("no built-in example {other}; choose 1, 2 or 3"))),
        };
        let group = |name: &str, (mean, sd): (f64, f64)| -> Result<GroupSpec> {
            Ok(GroupSpec {
                name: name.into(),
                cost: ContinuousDistribution::normal(mean, sd)?,
                signals: default_signals(),
                stakes: None,
                rewards: None,
                rule: None,
            })
        };
        Ok(Scenario {
            version: SCENARIO_VERSION,
            groups: vec![group("X", x_cost)?, group("Y", y_cost)?],
            options: RunOptions { mode: Some(mode), ..RunOptions::default() },
        })
    }
}

/// `f0 = N(0, 1)`, `f1 = N(1, 1)`.
pub fn default_signals() -> SignalModel {
    SignalModel::new(
        ContinuousDistribution::Normal { mean: 0.0, sd: 1.0 },
        ContinuousDistribution::Normal { mean: 1.0, sd: 1.0 },
    )
}
