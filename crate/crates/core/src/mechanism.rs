//! Two-stage fairness mechanism.
//!
//! Stage one post-processes each group's signal with a randomized two-piece
//! rule so both groups face the same true and false positive rates
//! `(T, F)` with `T > F`. Stage two sets stakes so that both groups comply
//! at the same rate in equilibrium, which (given equal error rates) yields
//! identical confusion matrices and hence predictive parity.
//!
//! Two stake designers are provided. [`design_stakes_theorem1`] leaves the
//! group with higher sincere prevalence at a base reward and raises the other
//! group's stakes until prevalences match; it always succeeds and keeps
//! incentives aligned. [`design_stakes_equal`] looks for one shared stake
//! level, which exists exactly when the cost CDFs cross.

use serde::{Deserialize, Serialize};

use crate::classifier::{error_profile, DecisionRule, ErrorProfile};
use crate::distributions::{classify_dominance_default, verify_mlrp, DominanceVerdict, SignalModel};
use crate::equilibrium::{outcome_from_profile, ppv, EquilibriumOutcome, GroupEnvironment, Ppv, Stakes};
use crate::error::{Error, Result};
use crate::fairness::{evaluate, FairnessReport, DEFAULT_TOLERANCE};

/// Grid size for the coarse threshold scan.
pub const THRESHOLD_GRID: usize = 2049;
/// Width at which golden-section refinement of the threshold stops.
pub const THRESHOLD_TOL: f64 = 1e-8;
/// Grid size used for the signal ordering check before construction.
pub const MLRP_GRID: usize = 4097;

/// Common error rates imposed on both groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub tpr: f64,
    pub fpr: f64,
}

impl Targets {
    /// `T - F`.
    pub fn margin(&self) -> f64 {
        self.tpr - self.fpr
    }

    fn check_informative(&self) -> Result<()> {
        if self.tpr > self.fpr {
            Ok(())
        } else {
            Err(Error::UninformativeTargets { tpr: self.tpr, fpr: self.fpr })
        }
    }
}

/// Stage-one quantities for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRuleDesign {
    pub name: String,
    pub threshold: f64,
    /// `F0(threshold)`.
    pub ell: f64,
    /// `F1(threshold)`.
    pub m: f64,
    pub a: f64,
    pub b: f64,
    pub rule: DecisionRule,
    pub realized: ErrorProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateDesign {
    pub groups: [GroupRuleDesign; 2],
    /// `T - F`.
    pub delta: f64,
    pub targets: Targets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum EqualStakesResult {
    Feasible {
        r: f64,
        crossing: f64,
        aligned_incentives_holds: bool,
    },
    /// `dominant` names the group whose costs stochastically dominate.
    InfeasibleDominance {
        dominant: String,
        dominated: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Theorem1,
    EqualStakes,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem1" => Ok(Mode::Theorem1),
            "equal-stakes" | "equal_stakes" => Ok(Mode::EqualStakes),
            other => Err(Error::InvalidScenario(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Theorem1 => "theorem1",
            Mode::EqualStakes => "equal-stakes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismOptions {
    pub tolerance: f64,
    /// Stakes of the higher-sincere-prevalence group in theorem1 mode.
    pub base_reward: f64,
}

impl Default for MechanismOptions {
    fn default() -> Self {
        MechanismOptions { tolerance: DEFAULT_TOLERANCE, base_reward: 0.0 }
    }
}

/// Everything produced by a mechanism run. The stage-one intermediates are
/// always kept so the construction can be audited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismDesign {
    pub mode: Mode,
    pub error_rates: ErrorRateDesign,
    pub stakes: [Stakes; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equal_stakes: Option<EqualStakesResult>,
    pub outcomes: [EquilibriumOutcome; 2],
    pub report: FairnessReport,
}

impl MechanismDesign {
    pub fn rules(&self) -> [DecisionRule; 2] {
        self.error_rates.groups.clone().map(|g| g.rule)
    }
}

/// Threshold maximizing `F0(s) - F1(s)` among signals with
/// `0 < F1(s) < F0(s) < 1`.
pub fn choose_threshold(model: &SignalModel) -> Result<f64> {
    let gap = |s: f64| {
        let (f0, f1) = (model.f0.cdf(s), model.f1.cdf(s));
        if 0.0 < f1 && f1 < f0 && f0 < 1.0 {
            Some(f0 - f1)
        } else {
            None
        }
    };
    let grid = model.default_grid(THRESHOLD_GRID)?;
    let (best_idx, best_gap) = grid
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| gap(s).map(|g| (i, g)))
        .fold(None, |acc: Option<(usize, f64)>, (i, g)| match acc {
            Some((_, bg)) if bg >= g => acc,
            _ => Some((i, g)),
        })
        .ok_or(Error::NoAdmissibleThreshold)?;

    let lo = grid[best_idx.saturating_sub(1)];
    let hi = grid[(best_idx + 1).min(grid.len() - 1)];
    let score = |s: f64| gap(s).unwrap_or(f64::NEG_INFINITY);
    let refined = golden_section_max(score, lo, hi, THRESHOLD_TOL);
    Ok(if score(refined) >= best_gap { refined } else { grid[best_idx] })
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Mixing weights `(a, b)` giving error rates `targets` for a two-piece rule
/// whose threshold has `F0 = ell`, `F1 = m`.
pub fn solve_mixing_weights(targets: Targets, ell: f64, m: f64) -> (f64, f64) {
    let Targets { tpr, fpr } = targets;
    let a = (fpr * (1.0 - m) - tpr * (1.0 - ell)) / (ell - m);
    let b = (tpr * ell - fpr * m) / (ell - m);
    (a, b)
}

/// Mixing weights for targets `(1/2 + delta, 1/2)`:
/// `a = 1/2 - delta (1 - ell) / (ell - m)`, `b = 1/2 + delta ell / (ell - m)`.
/// Same solution as [`solve_mixing_weights`], but better conditioned when
/// `ell - m` is small.
pub fn margin_weights(delta: f64, ell: f64, m: f64) -> (f64, f64) {
    let scale = delta / (ell - m);
    (0.5 - scale * (1.0 - ell), 0.5 + scale * ell)
}

/// `(ell - m) / (2 max(ell, 1 - ell))`: the largest margin a group can
/// support around a false positive rate of one half.
pub fn supported_margin(ell: f64, m: f64) -> f64 {
    (ell - m) / (2.0 * ell.max(1.0 - ell))
}

/// Stage one: per-group two-piece rules with common error rates.
pub fn equalize_error_rates(env_x: &GroupEnvironment, env_y: &GroupEnvironment) -> Result<ErrorRateDesign> {
    let mut picks = Vec::with_capacity(2);
    for env in [env_x, env_y] {
        let check = verify_mlrp(&env.signals, &env.signals.default_grid(MLRP_GRID)?);
        if !check.passes {
            return Err(Error::MlrpViolation {
                group: env.name.clone(),
                margin: check.worst_margin,
                at: check.worst_at.unwrap_or(f64::NAN),
            });
        }
        let s = choose_threshold(&env.signals)?;
        let ell = env.signals.f0.cdf(s);
        let m = env.signals.f1.cdf(s);
        picks.push((s, ell, m));
    }

    let delta = picks.iter().map(|&(_, ell, m)| supported_margin(ell, m)).fold(f64::INFINITY, f64::min);
    let targets = Targets { tpr: 0.5 + delta, fpr: 0.5 };
    targets.check_informative()?;

    let mut groups = Vec::with_capacity(2);
    for (env, (s, ell, m)) in [env_x, env_y].into_iter().zip(picks) {
        let (a, b) = margin_weights(delta, ell, m);
        let slack = 1e-12;
        if !(a >= -slack && b <= 1.0 + slack && a < b) {
            return Err(Error::InfeasibleWeights { group: env.name.clone(), a, b });
        }
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        let rule = DecisionRule::TwoPiece { s, a, b };
        let realized = error_profile(&rule, &env.signals)?;
        groups.push(GroupRuleDesign { name: env.name.clone(), threshold: s, ell, m, a, b, rule, realized });
    }
    let groups: [GroupRuleDesign; 2] = groups.try_into().expect("two groups");

    Ok(ErrorRateDesign { groups, delta, targets })
}

/// Stage two with differential stakes.
///
/// The group with the higher sincere prevalence (ties: the first group)
/// receives `base_reward`; the other receives the stakes whose cutoff is
/// the generalized inverse of its cost CDF at the first group's
/// equilibrium prevalence.
pub fn design_stakes_theorem1(
    env_x: &GroupEnvironment,
    env_y: &GroupEnvironment,
    targets: Targets,
    base_reward: f64,
) -> Result<[Stakes; 2]> {
    targets.check_informative()?;
    let margin = targets.margin();
    let envs = [env_x, env_y];
    let leader = if env_x.sincere_prevalence() >= env_y.sincere_prevalence() { 0 } else { 1 };
    let follower = 1 - leader;

    let point = base_reward * margin;
    let matched = envs[leader].cost.cdf(point);
    // above the median, match survival probabilities: cdf rounds to 1 long
    // before the tail mass underflows
    let cutoff = if matched > 0.5 {
        envs[follower].cost.isf(envs[leader].cost.sf(point))
    } else {
        envs[follower].cost.quantile(matched)
    }
    .map_err(|_| Error::DegenerateSincerePrevalence { group: envs[leader].name.clone(), prevalence: matched })?;

    let mut stakes = [Stakes(0.0); 2];
    stakes[leader] = Stakes(base_reward);
    stakes[follower] = Stakes(cutoff / margin);
    Ok(stakes)
}

/// Stage two with a single shared stake level.
///
/// Infeasible under strict dominance of the cost CDFs. Otherwise the shared
/// cutoff is a crossing point: the largest non-negative crossing if any
/// (keeping incentives aligned), else the crossing closest to zero.
pub fn design_stakes_equal(
    env_x: &GroupEnvironment,
    env_y: &GroupEnvironment,
    targets: Targets,
) -> Result<EqualStakesResult> {
    targets.check_informative()?;
    let margin = targets.margin();
    let verdict = classify_dominance_default(&env_x.cost, &env_y.cost)?;
    Ok(match verdict {
        DominanceVerdict::SecondDominatesFirst => {
            EqualStakesResult::InfeasibleDominance { dominant: env_y.name.clone(), dominated: env_x.name.clone() }
        }
        DominanceVerdict::FirstDominatesSecond => {
            EqualStakesResult::InfeasibleDominance { dominant: env_x.name.clone(), dominated: env_y.name.clone() }
        }
        DominanceVerdict::IdenticalWithinTolerance => {
            EqualStakesResult::Feasible { r: 0.0, crossing: 0.0, aligned_incentives_holds: true }
        }
        DominanceVerdict::Crossing { points } => {
            let non_negative = points
                .iter()
                .copied()
                .filter(|&c| c >= 0.0)
                .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))));
            let crossing = non_negative.unwrap_or_else(|| {
                points
                    .iter()
                    .copied()
                    .min_by(|a, b| a.abs().total_cmp(&b.abs()))
                    .expect("a crossing verdict carries at least one point")
            });
            EqualStakesResult::Feasible { r: crossing / margin, crossing, aligned_incentives_holds: crossing >= 0.0 }
        }
    })
}

/// Equilibria of both groups for given rules and stakes.
pub fn solve_pair(
    envs: [&GroupEnvironment; 2],
    rules: [&DecisionRule; 2],
    stakes: [Stakes; 2],
) -> Result<[EquilibriumOutcome; 2]> {
    let x = crate::equilibrium::solve_with_stakes(envs[0], rules[0], stakes[0])?;
    let y = crate::equilibrium::solve_with_stakes(envs[1], rules[1], stakes[1])?;
    Ok([x, y])
}

/// Runs both stages and evaluates the result.
pub fn run_mechanism(
    env_x: &GroupEnvironment,
    env_y: &GroupEnvironment,
    mode: Mode,
    options: &MechanismOptions,
) -> Result<MechanismDesign> {
    let error_rates = equalize_error_rates(env_x, env_y)?;
    let targets = error_rates.targets;
    let (stakes, equal_stakes) = match mode {
        Mode::Theorem1 => (design_stakes_theorem1(env_x, env_y, targets, options.base_reward)?, None),
        Mode::EqualStakes => match design_stakes_equal(env_x, env_y, targets)? {
            EqualStakesResult::InfeasibleDominance { dominant, dominated } => {
                return Err(Error::InfeasibleDominance { dominant, dominated })
            }
            feasible @ EqualStakesResult::Feasible { r, .. } => ([Stakes(r), Stakes(r)], Some(feasible)),
        },
    };

    let [gx, gy] = &error_rates.groups;
    let outcomes = [
        outcome_from_profile(&env_x.cost, gx.realized, stakes[0]),
        outcome_from_profile(&env_y.cost, gy.realized, stakes[1]),
    ];
    let report = evaluate([&outcomes[0], &outcomes[1]], options.tolerance);
    Ok(MechanismDesign { mode, error_rates, stakes, equal_stakes, outcomes, report })
}

/// One row of a shared-stakes sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: f64,
    pub prevalence: [f64; 2],
    pub ppv: [Ppv; 2],
    /// `π^X - π^Y`.
    pub prevalence_gap: f64,
    /// `PPV^X - PPV^Y`, absent when either PPV is undefined.
    pub ppv_gap: Option<f64>,
}

/// Applies every shared stake level in `r_values` to both groups.
pub fn sweep_shared_stakes(
    envs: [&GroupEnvironment; 2],
    rules: [&DecisionRule; 2],
    r_values: &[f64],
) -> Result<Vec<SweepRow>> {
    let profiles = [error_profile(rules[0], &envs[0].signals)?, error_profile(rules[1], &envs[1].signals)?];
    Ok(r_values
        .iter()
        .map(|&r| {
            let out = [0, 1].map(|g| outcome_from_profile(&envs[g].cost, profiles[g], Stakes(r)));
            let ppv_gap = match (out[0].ppv.value(), out[1].ppv.value()) {
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            };
            SweepRow {
                r,
                prevalence: [out[0].prevalence, out[1].prevalence],
                ppv: [out[0].ppv, out[1].ppv],
                prevalence_gap: out[0].prevalence - out[1].prevalence,
                ppv_gap,
            }
        })
        .collect())
}

/// PPV at a prevalence under the common targets.
pub fn target_ppv(prevalence: f64, targets: Targets) -> Ppv {
    ppv(prevalence, &ErrorProfile::new(targets.tpr, targets.fpr))
}
