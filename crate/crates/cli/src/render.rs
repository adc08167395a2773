//! Human-readable report text. Numbers are printed to six significant
//! figures; JSON output keeps full precision.

use std::fmt::Write;

use stakes_core::distributions::ContinuousDistribution;
use stakes_core::fairness::FairnessReport;
use stakes_core::mechanism::{EqualStakesResult, MechanismDesign};
use stakes_core::montecarlo::Comparison;
use stakes_core::scenario::Scenario;
use stakes_core::{EquilibriumOutcome, Ppv};

use crate::{AuditReport, SimulateReport};

/// Six significant figures, trailing zeros trimmed.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponent form");
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn distribution(d: &ContinuousDistribution) -> String {
    match d {
        ContinuousDistribution::Normal { mean, sd } => format!("Normal(mean {}, sd {})", sig(*mean), sig(*sd)),
        ContinuousDistribution::PiecewiseLinear { knots } => {
            let lo = knots.first().map_or(f64::NAN, |k| k[0]);
            let hi = knots.last().map_or(f64::NAN, |k| k[0]);
            format!("PiecewiseLinear({} knots on [{}, {}])", knots.len(), sig(lo), sig(hi))
        }
    }
}

fn ppv(p: Ppv) -> String {
    match p {
        Ppv::Defined(v) => sig(v),
        Ppv::Undefined => "undefined".into(),
    }
}

fn groups_header(out: &mut String, scenario: &Scenario) {
    for g in &scenario.groups {
        let _ = writeln!(out, "group {}: cost {}", g.name, distribution(&g.cost));
        let _ = writeln!(
            out,
            "  signals: f0 {} (non-compliant), f1 {} (compliant)",
            distribution(&g.signals.f0),
            distribution(&g.signals.f1)
        );
    }
}

fn outcomes(out: &mut String, names: [&str; 2], outcomes: &[EquilibriumOutcome; 2]) {
    let _ = writeln!(out, "equilibrium:");
    for (name, o) in names.iter().zip(outcomes) {
        let c = &o.confusion;
        let _ = writeln!(
            out,
            "  {name}: cutoff {}  prevalence {}  sincere {}  tpr {}  fpr {}  ppv {}",
            sig(o.cutoff),
            sig(o.prevalence),
            sig(o.sincere_prevalence),
            sig(o.profile.tpr),
            sig(o.profile.fpr),
            ppv(o.ppv)
        );
        let _ = writeln!(
            out,
            "     confusion tp {}  fp {}  fn {}  tn {}",
            sig(c.true_pos),
            sig(c.false_pos),
            sig(c.false_neg),
            sig(c.true_neg)
        );
    }
}

pub fn fairness(out: &mut String, names: [&str; 2], r: &FairnessReport) {
    let _ = writeln!(out, "fairness (tolerance {}):", sig(r.tolerance));
    let eb = &r.error_rate_balance;
    let _ = writeln!(
        out,
        "  error-rate balance   {}  |tpr gap| {}  |fpr gap| {}",
        pass(eb.pass),
        sig(eb.tpr_gap),
        sig(eb.fpr_gap)
    );
    let pp = &r.predictive_parity;
    let detail = match (pp.ppv_gap, &pp.reason) {
        (Some(gap), _) => format!("|ppv gap| {}", sig(gap)),
        (None, Some(reason)) => reason.clone(),
        (None, None) => "ppv undefined".into(),
    };
    let _ = writeln!(out, "  predictive parity    {}  {detail}", pass(pp.pass));
    let _ = writeln!(
        out,
        "  equal stakes         {}  |stakes gap| {}",
        pass(r.equal_stakes.pass),
        sig(r.equal_stakes.stakes_gap)
    );
    let ai = &r.aligned_incentives;
    let _ = writeln!(
        out,
        "  aligned incentives   {}  margins {} {}, {} {}",
        pass(ai.pass),
        names[0],
        sig(ai.margins[0]),
        names[1],
        sig(ai.margins[1])
    );
}

pub fn design(scenario: &Scenario, d: &MechanismDesign) -> String {
    let names = [scenario.groups[0].name.as_str(), scenario.groups[1].name.as_str()];
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", d.mode);
    groups_header(&mut out, scenario);
    let er = &d.error_rates;
    let e = er.delta;
    let _ = writeln!(
        out,
        "error-rate targets: TPR {}  FPR {}  ℰ = TPR - FPR = {}",
        sig(er.targets.tpr),
        sig(er.targets.fpr),
        sig(e)
    );
    for g in &er.groups {
        let _ = writeln!(
            out,
            "  {}: threshold {}  F0 {}  F1 {}  a {}  b {}",
            g.name,
            sig(g.threshold),
            sig(g.ell),
            sig(g.m),
            sig(g.a),
            sig(g.b)
        );
    }
    let _ = writeln!(out, "stakes:");
    for (name, s) in names.iter().zip(d.stakes) {
        let _ = writeln!(out, "  {name}: r {}  (r·ℰ = {})", sig(s.0), sig(s.0 * e));
    }
    match &d.equal_stakes {
        Some(EqualStakesResult::Feasible { r, crossing, aligned_incentives_holds }) => {
            let _ = writeln!(
                out,
                "equal stakes: shared r {} = {}/ℰ at cost crossing {}; aligned incentives {}",
                sig(*r),
                sig(*crossing),
                sig(*crossing),
                if *aligned_incentives_holds { "hold" } else { "violated" }
            );
        }
        Some(EqualStakesResult::InfeasibleDominance { dominant, dominated }) => {
            let _ = writeln!(out, "equal stakes: infeasible, {dominant} dominates {dominated}");
        }
        None => {}
    }
    outcomes(&mut out, names, &d.outcomes);
    fairness(&mut out, names, &d.report);
    out
}

pub fn audit(scenario: &Scenario, a: &AuditReport) -> String {
    let names = [scenario.groups[0].name.as_str(), scenario.groups[1].name.as_str()];
    let mut out = String::from("audit of supplied rules and stakes\n");
    groups_header(&mut out, scenario);
    for (name, o) in names.iter().zip(&a.outcomes) {
        let _ = writeln!(out, "  {name}: r {}  ℰ {}", sig(o.stakes.0), sig(o.profile.tpr - o.profile.fpr));
    }
    outcomes(&mut out, names, &a.outcomes);
    fairness(&mut out, names, &a.report);
    out
}

fn comparison(out: &mut String, c: &Comparison) {
    let _ = writeln!(out, "comparison against analytic values (|z| <= {}):", sig(c.z_limit));
    for cell in &c.cells {
        let z = cell.z.map_or_else(|| "exact".to_string(), sig);
        let _ = writeln!(
            out,
            "  {:<4} {:<10} simulated {:<10} analytic {:<10} z {:<10} {}",
            cell.group,
            cell.quantity,
            sig(cell.empirical),
            sig(cell.expected),
            z,
            pass(cell.pass)
        );
    }
    let _ = writeln!(out, "verdict: {}", pass(c.pass));
}

pub fn simulation(r: &SimulateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "seed {}  agents per group {}", r.simulation.seed, r.n);
    for g in &r.simulation.groups {
        let c = g.counts;
        let _ = writeln!(
            out,
            "  {}: cutoff {}  tp {}  fp {}  fn {}  tn {}",
            g.name,
            sig(g.cutoff),
            c.tp,
            c.fp,
            c.fn_,
            c.tn
        );
    }
    comparison(&mut out, &r.comparison);
    out
}
