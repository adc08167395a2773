//! The four fairness criteria evaluated on a pair of equilibrium outcomes.

use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumOutcome;

/// Analytic tolerance used when none is supplied.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateBalance {
    pub tpr_gap: f64,
    pub fpr_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictiveParity {
    /// `None` when either group's PPV is undefined.
    pub ppv_gap: Option<f64>,
    pub undefined: bool,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualStakes {
    pub stakes_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedIncentives {
    /// `π^g - H^g(0)` per group, in group order.
    pub margins: [f64; 2],
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub tolerance: f64,
    pub error_rate_balance: ErrorRateBalance,
    pub predictive_parity: PredictiveParity,
    pub equal_stakes: EqualStakes,
    pub aligned_incentives: AlignedIncentives,
}

impl FairnessReport {
    pub fn all_pass(&self) -> bool {
        self.error_rate_balance.pass
            && self.predictive_parity.pass
            && self.equal_stakes.pass
            && self.aligned_incentives.pass
    }
}

/// Evaluates the criteria for two groups. Gaps are absolute differences;
/// a criterion passes when its gap is at most `tol` (aligned incentives:
/// every margin at least `-tol`).
pub fn evaluate(outcomes: [&EquilibriumOutcome; 2], tol: f64) -> FairnessReport {
    let [x, y] = outcomes;

    let tpr_gap = (x.profile.tpr - y.profile.tpr).abs();
    let fpr_gap = (x.profile.fpr - y.profile.fpr).abs();
    let error_rate_balance = ErrorRateBalance { tpr_gap, fpr_gap, pass: tpr_gap <= tol && fpr_gap <= tol };

    let predictive_parity = match (x.ppv.value(), y.ppv.value()) {
        (Some(a), Some(b)) => {
            let gap = (a - b).abs();
            PredictiveParity { ppv_gap: Some(gap), undefined: false, pass: gap <= tol, reason: None }
        }
        _ => PredictiveParity {
            ppv_gap: None,
            undefined: true,
            pass: false,
            reason: Some("PPV undefined: a group receives no favorable decisions".into()),
        },
    };

    let stakes_gap = (x.stakes.0 - y.stakes.0).abs();
    let equal_stakes = EqualStakes { stakes_gap, pass: stakes_gap <= tol };

    let margins = [x.prevalence - x.sincere_prevalence, y.prevalence - y.sincere_prevalence];
    let aligned_incentives = AlignedIncentives { margins, pass: margins.iter().all(|&m| m >= -tol) };

    FairnessReport { tolerance: tol, error_rate_balance, predictive_parity, equal_stakes, aligned_incentives }
}
