//! Commands behind the `stakes` binary. Each `cmd_*` function returns the
//! structured result; printing and exit codes live in `main.rs`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use stakes_core::mechanism::{equalize_error_rates, solve_pair, sweep_shared_stakes, SweepRow};
use stakes_core::montecarlo::{compare, simulate};
use stakes_core::{
    evaluate, Comparison, DecisionRule, EquilibriumOutcome, ErrorKind, FairnessReport, MechanismDesign, Mode, Scenario,
    SimulationResult, Stakes,
};

pub mod render;

/// Environment variable naming the directory for generated files.
pub const OUT_DIR_ENV: &str = "STAKES_OUT_DIR";

/// Points on the cost grid written for example figures.
pub const FIGURE_POINTS: usize = 401;

/// Process exit code for an error: 2 for invalid input, 3 for a design
/// that cannot be constructed, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<stakes_core::Error>()).map(|e| e.kind()) {
        Some(ErrorKind::Validation) => 2,
        Some(ErrorKind::Construction) => 3,
        _ => 1,
    }
}

pub fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Scenario::from_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub id: u8,
    pub scenario: Scenario,
    pub design: MechanismDesign,
    pub figure_csv: PathBuf,
    pub cutoffs_csv: PathBuf,
}

/// Runs a built-in example and writes its figure data into `out_dir`.
pub fn cmd_example(id: u8, out_dir: &Path) -> anyhow::Result<ExampleReport> {
    let scenario = Scenario::example(id)?;
    let design = scenario.run(scenario.mode())?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let figure_csv = out_dir.join(format!("example{id}_figure.csv"));
    let cutoffs_csv = out_dir.join(format!("example{id}_cutoffs.csv"));
    write_figure(&scenario, &design, &figure_csv, &cutoffs_csv)?;
    Ok(ExampleReport { id, scenario, design, figure_csv, cutoffs_csv })
}

fn write_figure(scenario: &Scenario, design: &MechanismDesign, figure: &Path, cutoffs: &Path) -> anyhow::Result<()> {
    let [x, y] = [&scenario.groups[0], &scenario.groups[1]];
    let (xl, xh) = x.cost.quantile_range(0.001, 0.999)?;
    let (yl, yh) = y.cost.quantile_range(0.001, 0.999)?;
    let cuts = design.outcomes.each_ref().map(|o| o.cutoff);
    let lo = xl.min(yl).min(cuts[0]).min(cuts[1]);
    let hi = xh.max(yh).max(cuts[0]).max(cuts[1]);

    let mut w = csv::Writer::from_path(figure).with_context(|| format!("writing {}", figure.display()))?;
    w.write_record([
        "c".to_string(),
        format!("cdf_{}", x.name),
        format!("cdf_{}", y.name),
        format!("pdf_{}", x.name),
        format!("pdf_{}", y.name),
    ])?;
    for i in 0..FIGURE_POINTS {
        let c = lo + (hi - lo) * i as f64 / (FIGURE_POINTS - 1) as f64;
        w.write_record([c, x.cost.cdf(c), y.cost.cdf(c), x.cost.pdf(c), y.cost.pdf(c)].map(|v| v.to_string()))?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(cutoffs).with_context(|| format!("writing {}", cutoffs.display()))?;
    w.write_record(["group", "cutoff", "stakes", "prevalence", "sincere_prevalence"])?;
    for (g, o) in scenario.groups.iter().zip(&design.outcomes) {
        w.write_record([
            g.name.clone(),
            o.cutoff.to_string(),
            o.stakes.0.to_string(),
            o.prevalence.to_string(),
            o.sincere_prevalence.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Builds the mechanism for a scenario file. `mode` overrides the file's
/// own mode; rules and stakes in the file are ignored.
pub fn cmd_run(path: &Path, mode: Option<Mode>) -> anyhow::Result<(Scenario, MechanismDesign)> {
    let scenario = load_scenario(path)?;
    let design = scenario.run(mode.unwrap_or(scenario.mode()))?;
    Ok((scenario, design))
}

/// Rules from the file when every group has one, otherwise the
/// error-rate-equalizing rules.
fn sweep_rules(scenario: &Scenario) -> anyhow::Result<[DecisionRule; 2]> {
    if let Some(rules) = scenario.rules() {
        return Ok(rules);
    }
    let [x, y] = scenario.environments();
    Ok(equalize_error_rates(&x, &y)?.groups.map(|g| g.rule))
}

/// `steps` evenly spaced values from `r_min` to `r_max` inclusive.
pub fn r_grid(r_min: f64, r_max: f64, steps: usize) -> anyhow::Result<Vec<f64>> {
    if steps == 0 || !r_min.is_finite() || !r_max.is_finite() || r_max < r_min {
        bail!(stakes_core::Error::InvalidScenario(format!(
            "stakes grid needs finite r-min <= r-max and at least one step (got {r_min}, {r_max}, {steps})"
        )));
    }
    if steps == 1 {
        return Ok(vec![r_min]);
    }
    Ok((0..steps).map(|i| r_min + (r_max - r_min) * i as f64 / (steps - 1) as f64).collect())
}

pub fn cmd_sweep(path: &Path, r_min: f64, r_max: f64, steps: usize) -> anyhow::Result<(Scenario, Vec<SweepRow>)> {
    let scenario = load_scenario(path)?;
    let grid = r_grid(r_min, r_max, steps)?;
    let rules = sweep_rules(&scenario)?;
    let [x, y] = scenario.environments();
    let rows = sweep_shared_stakes([&x, &y], [&rules[0], &rules[1]], &grid)?;
    Ok((scenario, rows))
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// Sweep rows as CSV. Undefined PPVs and gaps are left empty.
pub fn sweep_csv<W: std::io::Write>(scenario: &Scenario, rows: &[SweepRow], out: W) -> anyhow::Result<()> {
    let (x, y) = (&scenario.groups[0].name, &scenario.groups[1].name);
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "r".to_string(),
        format!("pi_{x}"),
        format!("pi_{y}"),
        format!("ppv_{x}"),
        format!("ppv_{y}"),
        "prevalence_gap".to_string(),
        "ppv_gap".to_string(),
    ])?;
    for row in rows {
        w.write_record([
            row.r.to_string(),
            row.prevalence[0].to_string(),
            row.prevalence[1].to_string(),
            optional(row.ppv[0].value()),
            optional(row.ppv[1].value()),
            row.prevalence_gap.to_string(),
            optional(row.ppv_gap),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub outcomes: [EquilibriumOutcome; 2],
    pub report: FairnessReport,
}

fn explicit_design(scenario: &Scenario) -> anyhow::Result<([DecisionRule; 2], [Stakes; 2])> {
    match (scenario.rules(), scenario.stakes()) {
        (Some(rules), Some(stakes)) => Ok((rules, stakes)),
        _ => bail!(stakes_core::Error::MissingStakes(
            "every group needs an explicit rule and stakes (or rewards)".into()
        )),
    }
}

/// Evaluates the rules and stakes written in a scenario file.
pub fn cmd_audit(path: &Path) -> anyhow::Result<(Scenario, AuditReport)> {
    let scenario = load_scenario(path)?;
    let (rules, stakes) = explicit_design(&scenario)?;
    let [x, y] = scenario.environments();
    let outcomes = solve_pair([&x, &y], [&rules[0], &rules[1]], stakes)?;
    let report = evaluate([&outcomes[0], &outcomes[1]], scenario.options.tolerance);
    Ok((scenario, AuditReport { outcomes, report }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub n: usize,
    pub simulation: SimulationResult,
    pub comparison: Comparison,
}

/// Simulates the file's explicit design if it has one, otherwise the
/// design built in the file's mode. `n` and `seed` default to the file's
/// options.
pub fn cmd_simulate(path: &Path, n: Option<usize>, seed: Option<u64>) -> anyhow::Result<SimulateReport> {
    let scenario = load_scenario(path)?;
    let n = n.unwrap_or(scenario.options.n);
    let seed = seed.unwrap_or(scenario.options.seed);
    let [x, y] = scenario.environments();
    let (rules, stakes, analytic) = match explicit_design(&scenario) {
        Ok((rules, stakes)) => {
            let analytic = solve_pair([&x, &y], [&rules[0], &rules[1]], stakes)?;
            (rules, stakes, analytic)
        }
        Err(_) => {
            let design = scenario.run(scenario.mode())?;
            (design.rules(), design.stakes, design.outcomes)
        }
    };
    let simulation = simulate([&x, &y], [&rules[0], &rules[1]], stakes, n, seed)?;
    let comparison = compare(&simulation, [&analytic[0], &analytic[1]]);
    Ok(SimulateReport { n, simulation, comparison })
}
