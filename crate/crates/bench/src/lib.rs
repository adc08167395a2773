//! Fixtures shared by the engine benchmarks.

use stakes_core::mechanism::MechanismOptions;
use stakes_core::{run_mechanism, ContinuousDistribution, GroupEnvironment, MechanismDesign, Mode, SignalModel};

pub fn normal(mean: f64, sd: f64) -> ContinuousDistribution {
    ContinuousDistribution::normal(mean, sd).expect("positive sd")
}

pub fn signals() -> SignalModel {
    SignalModel::new(normal(0.0, 1.0), normal(1.0, 1.0))
}

/// Example-1 costs: `X ~ N(0, 1)`, `Y ~ N(1, 1)`.
pub fn example_one() -> [GroupEnvironment; 2] {
    [GroupEnvironment::new("X", normal(0.0, 1.0), signals()), GroupEnvironment::new("Y", normal(1.0, 1.0), signals())]
}

/// Example-2 costs, which cross at 2.
pub fn example_two() -> [GroupEnvironment; 2] {
    [GroupEnvironment::new("X", normal(0.0, 2.0), signals()), GroupEnvironment::new("Y", normal(1.0, 1.0), signals())]
}

pub fn design(envs: &[GroupEnvironment; 2], mode: Mode) -> MechanismDesign {
    run_mechanism(&envs[0], &envs[1], mode, &MechanismOptions::default()).expect("example designs are feasible")
}
