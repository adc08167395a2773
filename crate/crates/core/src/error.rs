use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Inputs outside an operation's domain (bad probability, bad bracket).
    Domain,
    /// Malformed or inconsistent scenario / distribution / rule.
    Validation,
    /// The mechanism cannot be built for this environment.
    Construction,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("bracket [{lo}, {hi}] too narrow: CDFs must be < 0.001 at the left end and > 0.999 at the right end")]
    BracketTooNarrow { lo: f64, hi: f64 },
    #[error("threshold {threshold} lies outside the signal support (F1 = {f1}, F0 = {f0})")]
    SupportViolation { threshold: f64, f1: f64, f0: f64 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid decision rule: {0}")]
    InvalidRule(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("stakes not set for group {0}")]
    MissingStakes(String),
    #[error("signal model for group {group} violates MLRP (worst margin {margin:e} at s = {at})")]
    MlrpViolation { group: String, margin: f64, at: f64 },
    #[error("no admissible threshold with 0 < F1(s) < F0(s) < 1")]
    NoAdmissibleThreshold,
    #[error("mixing weights out of range for group {group}: a = {a}, b = {b}")]
    InfeasibleWeights { group: String, a: f64, b: f64 },
    #[error("sincere prevalence of group {group} is {prevalence}; cannot match it by quantile")]
    DegenerateSincerePrevalence { group: String, prevalence: f64 },
    #[error("targets not informative: TPR {tpr} must exceed FPR {fpr}")]
    UninformativeTargets { tpr: f64, fpr: f64 },
    #[error("equal stakes infeasible: costs of group {dominant} stochastically dominate those of group {dominated}")]
    InfeasibleDominance { dominant: String, dominated: String },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("sample size must be at least 1")]
    EmptyPopulation,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ProbabilityOutOfRange(_)
            | Error::BracketTooNarrow { .. }
            | Error::SupportViolation { .. }
            | Error::InvalidGrid(_)
            | Error::EmptyPopulation => ErrorKind::Domain,
            Error::InvalidDistribution(_)
            | Error::InvalidRule(_)
            | Error::InvalidScenario(_)
            | Error::MissingStakes(_) => ErrorKind::Validation,
            Error::MlrpViolation { .. }
            | Error::NoAdmissibleThreshold
            | Error::InfeasibleWeights { .. }
            | Error::DegenerateSincerePrevalence { .. }
            | Error::UninformativeTargets { .. }
            | Error::InfeasibleDominance { .. } => ErrorKind::Construction,
        }
    }
}
