//! Seeded agent-population simulation.
//!
//! Each agent draws a cost, complies iff the cost is at most the analytic
//! cutoff, draws a signal from the distribution matching its behavior and
//! finally receives a favorable decision with probability `δ(signal)`.
//!
//! Randomness comes from one ChaCha8 key derived from the seed. Group `g`
//! uses stream `g`, and agent `i` starts at word `8 i` of that stream, so
//! every agent's draws are fixed by `(seed, g, i)` regardless of how the
//! population is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::DecisionRule;
use crate::equilibrium::{compliance_cutoff, EquilibriumOutcome, GroupEnvironment, Stakes};
use crate::error::{Error, Result};

/// Stream words reserved per agent (three f64 draws use six).
const WORDS_PER_AGENT: u128 = 8;

/// Default z-score bound for [`compare`].
pub const Z_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    fn merge(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts { tp: self.tp + o.tp, fp: self.fp + o.fp, fn_: self.fn_ + o.fn_, tn: self.tn + o.tn }
    }
}

/// Empirical rate with its binomial standard error. `value` is `None` when
/// the conditioning set is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Option<f64>,
    pub se: Option<f64>,
    pub trials: u64,
}

impl Estimate {
    fn from_counts(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Estimate { value: None, se: None, trials };
        }
        let p = successes as f64 / trials as f64;
        Estimate { value: Some(p), se: Some((p * (1.0 - p) / trials as f64).sqrt()), trials }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSimulation {
    pub name: String,
    pub n_agents: u64,
    pub cutoff: f64,
    pub counts: ConfusionCounts,
    pub prevalence: Estimate,
    pub tpr: Estimate,
    pub fpr: Estimate,
    pub ppv: Estimate,
}

impl GroupSimulation {
    fn from_counts(name: String, cutoff: f64, counts: ConfusionCounts) -> Self {
        let n = counts.total();
        let ConfusionCounts { tp, fp, fn_, tn } = counts;
        GroupSimulation {
            name,
            n_agents: n,
            cutoff,
            counts,
            prevalence: Estimate::from_counts(tp + fn_, n),
            tpr: Estimate::from_counts(tp, tp + fn_),
            fpr: Estimate::from_counts(fp, fp + tn),
            ppv: Estimate::from_counts(tp, tp + fp),
        }
    }

    /// Confusion counts as population fractions `[tp, fp, fn, tn]`.
    pub fn cell_fractions(&self) -> [f64; 4] {
        let n = self.n_agents as f64;
        let c = self.counts;
        [c.tp as f64 / n, c.fp as f64 / n, c.fn_ as f64 / n, c.tn as f64 / n]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub seed: u64,
    pub groups: [GroupSimulation; 2],
}

/// Simulates `n` agents per group.
pub fn simulate(
    envs: [&GroupEnvironment; 2],
    rules: [&DecisionRule; 2],
    stakes: [Stakes; 2],
    n: usize,
    seed: u64,
) -> Result<SimulationResult> {
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut groups = Vec::with_capacity(2);
    for g in 0..2 {
        let env = envs[g];
        let rule = rules[g];
        let profile = crate::classifier::error_profile(rule, &env.signals)?;
        let cutoff = compliance_cutoff(&profile, stakes[g]);
        let counts = (0..n as u64)
            .into_par_iter()
            .fold(ConfusionCounts::default, |mut acc, i| {
                let mut rng = base.clone();
                rng.set_stream(g as u64);
                rng.set_word_pos(i as u128 * WORDS_PER_AGENT);
                let cost = env.cost.sample(&mut rng);
                let complies = cost <= cutoff;
                let signal = if complies { env.signals.f1.sample(&mut rng) } else { env.signals.f0.sample(&mut rng) };
                let favorable = rng.gen::<f64>() < rule.acceptance(signal);
                match (complies, favorable) {
                    (true, true) => acc.tp += 1,
                    (true, false) => acc.fn_ += 1,
                    (false, true) => acc.fp += 1,
                    (false, false) => acc.tn += 1,
                }
                acc
            })
            .reduce(ConfusionCounts::default, ConfusionCounts::merge);
        groups.push(GroupSimulation::from_counts(env.name.clone(), cutoff, counts));
    }
    Ok(SimulationResult { seed, groups: groups.try_into().expect("two groups") })
}

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub group: String,
    pub quantity: String,
    pub empirical: f64,
    pub expected: f64,
    pub se: f64,
    /// `None` when the standard error is zero and the values were compared
    /// exactly.
    pub z: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub z_limit: f64,
    pub cells: Vec<CellComparison>,
    pub pass: bool,
}

impl Comparison {
    fn from_cells(cells: Vec<CellComparison>, z_limit: f64) -> Self {
        let pass = cells.iter().all(|c| c.pass);
        Comparison { z_limit, cells, pass }
    }

    pub fn max_abs_z(&self) -> f64 {
        self.cells.iter().filter_map(|c| c.z).map(f64::abs).fold(0.0, f64::max)
    }
}

fn cell(group: &str, quantity: &str, empirical: f64, expected: f64, se: f64, z_limit: f64) -> CellComparison {
    let (z, pass) = if se > 0.0 {
        let z = (empirical - expected) / se;
        (Some(z), z.abs() <= z_limit)
    } else {
        (None, empirical == expected)
    };
    CellComparison { group: group.to_string(), quantity: quantity.to_string(), empirical, expected, se, z, pass }
}

fn binomial_se(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// z-scores of simulated against analytic quantities, with standard errors
/// taken under the analytic values. Conditional rates whose conditioning
/// set came out empty are skipped.
pub fn compare(sim: &SimulationResult, analytic: [&EquilibriumOutcome; 2]) -> Comparison {
    compare_with_limit(sim, analytic, Z_LIMIT)
}

pub fn compare_with_limit(sim: &SimulationResult, analytic: [&EquilibriumOutcome; 2], z_limit: f64) -> Comparison {
    let mut cells = Vec::new();
    for (g, out) in sim.groups.iter().zip(analytic) {
        let n = g.n_agents;
        let name = g.name.as_str();
        let pi = out.prevalence;
        cells.push(cell(name, "prevalence", g.prevalence.value.unwrap_or(0.0), pi, binomial_se(pi, n), z_limit));
        let fractions = g.cell_fractions();
        for (label, (emp, exp)) in ["tp", "fp", "fn", "tn"].iter().zip(fractions.into_iter().zip(out.confusion.cells()))
        {
            cells.push(cell(name, label, emp, exp, binomial_se(exp, n), z_limit));
        }
        if let Some(v) = g.tpr.value {
            cells.push(cell(name, "tpr", v, out.profile.tpr, binomial_se(out.profile.tpr, g.tpr.trials), z_limit));
        }
        if let Some(v) = g.fpr.value {
            cells.push(cell(name, "fpr", v, out.profile.fpr, binomial_se(out.profile.fpr, g.fpr.trials), z_limit));
        }
        if let (Some(v), Some(expected)) = (g.ppv.value, out.ppv.value()) {
            cells.push(cell(name, "ppv", v, expected, binomial_se(expected, g.ppv.trials), z_limit));
        }
    }
    Comparison::from_cells(cells, z_limit)
}

/// Two-sample z-scores between the simulated groups' confusion fractions,
/// prevalence and error rates.
pub fn compare_groups(sim: &SimulationResult) -> Comparison {
    let [x, y] = &sim.groups;
    let label = format!("{}-{}", x.name, y.name);
    let mut cells = Vec::new();
    let two_sample = |px: f64, nx: u64, py: f64, ny: u64| {
        let pooled = (px * nx as f64 + py * ny as f64) / (nx + ny) as f64;
        (pooled * (1.0 - pooled) * (1.0 / nx as f64 + 1.0 / ny as f64)).sqrt()
    };
    let (fx, fy) = (x.cell_fractions(), y.cell_fractions());
    for (i, q) in ["tp", "fp", "fn", "tn"].iter().enumerate() {
        let se = two_sample(fx[i], x.n_agents, fy[i], y.n_agents);
        cells.push(cell(&label, q, fx[i], fy[i], se, Z_LIMIT));
    }
    for (q, ex, ey) in [("prevalence", x.prevalence, y.prevalence), ("tpr", x.tpr, y.tpr), ("fpr", x.fpr, y.fpr)] {
        if let (Some(vx), Some(vy)) = (ex.value, ey.value) {
            let se = two_sample(vx, ex.trials, vy, ey.trials);
            cells.push(cell(&label, q, vx, vy, se, Z_LIMIT));
        }
    }
    Comparison::from_cells(cells, Z_LIMIT)
}
