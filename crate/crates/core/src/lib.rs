//! Equilibrium engine for strategic binary classification.
//!
//! Individuals choose whether to comply with a norm given a private cost and
//! a classifier that maps a noisy signal of their behavior to a favorable
//! decision. Compliance is endogenous: it responds to the classifier's error
//! rates and the stakes attached to its decisions. This crate computes that
//! response, builds a two-stage mechanism that equalizes error rates and then
//! prevalence (through stakes), audits four fairness criteria, and simulates
//! agent populations as an independent check on the analytic equilibria.
//!
//! Module map:
//! - [`distributions`]: cost and signal distributions, dominance and crossings
//! - [`classifier`]: piecewise-constant randomized decision rules and their error rates
//! - [`equilibrium`]: best response, prevalence, confusion masses, PPV
//! - [`mechanism`]: error-rate equalization and stakes design
//! - [`fairness`]: error-rate balance, predictive parity, equal stakes, aligned incentives
//! - [`montecarlo`]: seeded agent-population simulation
//! - [`scenario`]: JSON scenario format and the built-in examples

pub mod classifier;
pub mod distributions;
pub mod equilibrium;
mod error;
pub mod fairness;
pub mod mechanism;
pub mod montecarlo;
pub mod scenario;

pub use classifier::{error_profile, informativeness, DecisionRule, ErrorProfile};
pub use distributions::{
    classify_dominance, verify_mlrp, ContinuousDistribution, DominanceVerdict, MlrpCheck, SignalModel,
};
pub use equilibrium::{
    compliance_cutoff, ppv, solve_equilibrium, ConfusionMasses, EquilibriumOutcome, GroupEnvironment, Ppv, Stakes,
};
pub use error::{Error, ErrorKind, Result};
pub use fairness::{evaluate, FairnessReport};
pub use mechanism::{
    choose_threshold, design_stakes_equal, design_stakes_theorem1, equalize_error_rates, run_mechanism,
    EqualStakesResult, ErrorRateDesign, MechanismDesign, Mode, Targets,
};
pub use montecarlo::{compare, simulate, Comparison, SimulationResult};
pub use scenario::Scenario;

/// The two groups. The first group in a scenario plays role `X`.
pub const GROUP_COUNT: usize = 2;
