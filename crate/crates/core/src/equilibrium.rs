//! Best response to a classifier, equilibrium prevalence, confusion masses
//! and positive predictive value.
//!
//! An individual with cost `c` complies iff `c <= r * (tpr - fpr)`, so the
//! equilibrium prevalence of a group is its cost CDF at that cutoff. The
//! rule therefore enters the equilibrium only through its error profile.

use serde::{Deserialize, Serialize};

use crate::classifier::{error_profile, informativeness, DecisionRule, ErrorProfile};
use crate::distributions::{ContinuousDistribution, SignalModel};
use crate::error::{Error, Result};

/// Net benefit of a favorable decision. May be negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Stakes(pub f64);

impl Stakes {
    /// Net stakes from the payoff of a favorable (`r1`) and an unfavorable
    /// (`r0`) decision.
    pub fn from_rewards(r1: f64, r0: f64) -> Self {
        Stakes(r1 - r0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// One group's primitives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupEnvironment {
    pub name: String,
    pub cost: ContinuousDistribution,
    pub signals: SignalModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stakes: Option<Stakes>,
}

impl GroupEnvironment {
    pub fn new(name: impl Into<String>, cost: ContinuousDistribution, signals: SignalModel) -> Self {
        GroupEnvironment { name: name.into(), cost, signals, stakes: None }
    }

    pub fn with_stakes(mut self, stakes: Stakes) -> Self {
        self.stakes = Some(stakes);
        self
    }

    /// Compliance with no extrinsic incentive, `H(0)`.
    pub fn sincere_prevalence(&self) -> f64 {
        self.cost.cdf(0.0)
    }
}

/// Population masses of the four (behavior, decision) cells. Sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMasses {
    #[serde(rename = "tp")]
    pub true_pos: f64,
    #[serde(rename = "fp")]
    pub false_pos: f64,
    #[serde(rename = "fn")]
    pub false_neg: f64,
    #[serde(rename = "tn")]
    pub true_neg: f64,
}

impl ConfusionMasses {
    pub fn from_rates(prevalence: f64, profile: &ErrorProfile) -> Self {
        ConfusionMasses {
            true_pos: prevalence * profile.tpr,
            false_neg: prevalence * (1.0 - profile.tpr),
            false_pos: (1.0 - prevalence) * profile.fpr,
            true_neg: (1.0 - prevalence) * (1.0 - profile.fpr),
        }
    }

    pub fn total(&self) -> f64 {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    pub fn cells(&self) -> [f64; 4] {
        [self.true_pos, self.false_pos, self.false_neg, self.true_neg]
    }

    /// Largest absolute cell difference.
    pub fn max_abs_diff(&self, other: &ConfusionMasses) -> f64 {
        self.cells().iter().zip(other.cells()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Positive predictive value; undefined when no favorable decisions are
/// issued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ppv {
    Defined(f64),
    Undefined,
}

impl Ppv {
    pub fn value(self) -> Option<f64> {
        match self {
            Ppv::Defined(v) => Some(v),
            Ppv::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumOutcome {
    pub cutoff: f64,
    pub prevalence: f64,
    pub sincere_prevalence: f64,
    pub profile: ErrorProfile,
    pub stakes: Stakes,
    pub confusion: ConfusionMasses,
    pub ppv: Ppv,
}

/// `r * (tpr - fpr)`.
pub fn compliance_cutoff(profile: &ErrorProfile, stakes: Stakes) -> f64 {
    stakes.0 * informativeness(profile)
}

/// `π·tpr / (π·tpr + (1-π)·fpr)`.
pub fn ppv(prevalence: f64, profile: &ErrorProfile) -> Ppv {
    let accepted_compliers = prevalence * profile.tpr;
    let denom = accepted_compliers + (1.0 - prevalence) * profile.fpr;
    if denom == 0.0 {
        Ppv::Undefined
    } else {
        Ppv::Defined(accepted_compliers / denom)
    }
}

/// Equilibrium given a group's cost distribution, the error profile its
/// members face and their stakes.
pub fn outcome_from_profile(
    cost: &ContinuousDistribution,
    profile: ErrorProfile,
    stakes: Stakes,
) -> EquilibriumOutcome {
    let cutoff = compliance_cutoff(&profile, stakes);
    // ties comply: H is right-continuous, so H(cutoff) counts c == cutoff
    let prevalence = cost.cdf(cutoff);
    EquilibriumOutcome {
        cutoff,
        prevalence,
        sincere_prevalence: cost.cdf(0.0),
        profile,
        stakes,
        confusion: ConfusionMasses::from_rates(prevalence, &profile),
        ppv: ppv(prevalence, &profile),
    }
}

/// Equilibrium under explicit stakes, ignoring any stakes stored on `env`.
pub fn solve_with_stakes(env: &GroupEnvironment, rule: &DecisionRule, stakes: Stakes) -> Result<EquilibriumOutcome> {
    if !stakes.0.is_finite() {
        return Err(Error::InvalidScenario(format!("stakes for group {} are not finite", env.name)));
    }
    let profile = error_profile(rule, &env.signals)?;
    Ok(outcome_from_profile(&env.cost, profile, stakes))
}

/// Equilibrium under the stakes stored on `env`.
pub fn solve_equilibrium(env: &GroupEnvironment, rule: &DecisionRule) -> Result<EquilibriumOutcome> {
    let stakes = env.stakes.ok_or_else(|| Error::MissingStakes(env.name.clone()))?;
    solve_with_stakes(env, rule, stakes)
}
