//! Acceptance criteria. Runs as a plain binary so each criterion reports a
//! single PASS/FAIL line with its timing.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stakes_core::distributions::{classify_dominance_default, default_dominance_bracket};
use stakes_core::mechanism::{
    design_stakes_equal, equalize_error_rates, solve_pair, sweep_shared_stakes, MechanismOptions,
};
use stakes_core::montecarlo::{compare, simulate};
use stakes_core::{
    run_mechanism, ContinuousDistribution, DominanceVerdict, EqualStakesResult, GroupEnvironment, Mode, SignalModel,
};

const ENVIRONMENTS: usize = 500;
const ENV_SEED: u64 = 20_240_917;

fn normal(mean: f64, sd: f64) -> ContinuousDistribution {
    ContinuousDistribution::normal(mean, sd).unwrap()
}

fn default_signals() -> SignalModel {
    SignalModel::new(normal(0.0, 1.0), normal(1.0, 1.0))
}

fn example(x: (f64, f64), y: (f64, f64)) -> [GroupEnvironment; 2] {
    [
        GroupEnvironment::new("X", normal(x.0, x.1), default_signals()),
        GroupEnvironment::new("Y", normal(y.0, y.1), default_signals()),
    ]
}

/// Normal costs with mean in [-3, 3] and sd in [0.3, 3]; normal signals
/// with a common sd and a mean gap of at least 0.2.
fn random_environments() -> Vec<[GroupEnvironment; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(ENV_SEED);
    let mut group = |name: &str| {
        let cost = normal(rng.gen_range(-3.0..=3.0), rng.gen_range(0.3..=3.0));
        let (mu, sd, gap) = (rng.gen_range(-2.0..=2.0), rng.gen_range(0.5..=2.0), rng.gen_range(0.2..=3.0));
        GroupEnvironment::new(name, cost, SignalModel::new(normal(mu, sd), normal(mu + gap, sd)))
    };
    (0..ENVIRONMENTS).map(|_| [group("X"), group("Y")]).collect()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(actual: f64, expected: f64, tol: f64, what: &str) -> Result<(), String> {
    check((actual - expected).abs() <= tol, || format!("{what} = {actual}, expected {expected} ± {tol}"))
}

fn criterion_1() -> Result<String, String> {
    let [x, y] = example((0.0, 1.0), (1.0, 1.0));
    let d = run_mechanism(&x, &y, Mode::Theorem1, &MechanismOptions::default()).map_err(|e| e.to_string())?;
    let e = d.error_rates.targets.margin();
    within(d.stakes[0].0, 0.0, 0.0, "r^X")?;
    within(d.stakes[1].0, 1.0 / e, 1e-9, "r^Y")?;
    within(d.outcomes[0].prevalence, 0.5, 1e-6, "pi^X")?;
    within(d.outcomes[1].prevalence, 0.5, 1e-6, "pi^Y")?;
    within(d.outcomes[1].sincere_prevalence, 0.158655, 1e-4, "Y sincere prevalence")?;
    let r = &d.report;
    check(r.error_rate_balance.pass && r.predictive_parity.pass && r.aligned_incentives.pass, || {
        format!("EB/PP/AI should pass: {r:?}")
    })?;
    check(!r.equal_stakes.pass, || "equal stakes should fail".into())?;
    Ok(format!("r^Y = {:.6} = 1/{:.6}, pi = 0.5, Y sincere {:.6}", d.stakes[1].0, e, d.outcomes[1].sincere_prevalence))
}

fn equal_stakes_example(
    y: (f64, f64),
    crossing: f64,
    prevalence: f64,
) -> Result<(String, stakes_core::FairnessReport), String> {
    let [x, y] = example((0.0, 2.0), y);
    let d = run_mechanism(&x, &y, Mode::EqualStakes, &MechanismOptions::default()).map_err(|e| e.to_string())?;
    let e = d.error_rates.targets.margin();
    let Some(EqualStakesResult::Feasible { r, crossing: c, .. }) = d.equal_stakes.clone() else {
        return Err(format!("expected a feasible equal-stakes design, got {:?}", d.equal_stakes));
    };
    within(c, crossing, 1e-8, "crossing")?;
    within(r * e, crossing, 1e-8, "r * (T - F)")?;
    within(d.stakes[0].0, d.stakes[1].0, 0.0, "stakes gap")?;
    for o in &d.outcomes {
        within(o.prevalence, prevalence, 1e-4, "prevalence")?;
    }
    Ok((format!("crossing {c:.10}, r = {r:.6}, pi = {:.6}", d.outcomes[0].prevalence), d.report))
}

fn criterion_2() -> Result<String, String> {
    let (line, r) = equal_stakes_example((1.0, 1.0), 2.0, 0.841345)?;
    check(r.all_pass(), || format!("all four criteria should pass: {r:?}"))?;
    Ok(line)
}

fn criterion_3() -> Result<String, String> {
    let (line, r) = equal_stakes_example((-1.0, 1.0), -2.0, 0.158655)?;
    check(r.error_rate_balance.pass && r.predictive_parity.pass && r.equal_stakes.pass, || {
        format!("EB/PP/ES should pass: {r:?}")
    })?;
    check(!r.aligned_incentives.pass, || "aligned incentives should fail".into())?;
    Ok(line)
}

fn criterion_4() -> Result<String, String> {
    let mut failures = Vec::new();
    for (i, [x, y]) in random_environments().iter().enumerate() {
        let d = match run_mechanism(x, y, Mode::Theorem1, &MechanismOptions::default()) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("env {i}: {e}"));
                continue;
            }
        };
        let t = d.error_rates.targets;
        let mut problems = Vec::new();
        for g in &d.error_rates.groups {
            if !((0.0..=1.0).contains(&g.a) && (0.0..=1.0).contains(&g.b) && g.b > g.a) {
                problems.push(format!("weights ({}, {})", g.a, g.b));
            }
        }
        if !(t.margin() > 0.0 && (t.margin() - d.error_rates.delta).abs() <= 1e-15) {
            problems.push(format!("T - F = {} vs delta {}", t.margin(), d.error_rates.delta));
        }
        for o in &d.outcomes {
            if (o.profile.tpr - t.tpr).abs() > 1e-10 || (o.profile.fpr - t.fpr).abs() > 1e-10 {
                problems.push(format!("realized profile {:?} vs targets {t:?}", o.profile));
            }
        }
        let gap = d.outcomes[0].confusion.max_abs_diff(&d.outcomes[1].confusion);
        if gap > 1e-8 {
            problems.push(format!("confusion gap {gap}"));
        }
        if d.report.aligned_incentives.margins.iter().any(|m| *m < -1e-12) {
            problems.push(format!("AI margins {:?}", d.report.aligned_incentives.margins));
        }
        if !problems.is_empty() {
            failures.push(format!("env {i}: {}", problems.join(", ")));
        }
    }
    check(failures.is_empty(), || format!("{} failures: {}", failures.len(), failures.join("; ")))?;
    Ok(format!("{ENVIRONMENTS} environments, zero failures"))
}

fn criterion_5() -> Result<String, String> {
    let (mut infeasible, mut feasible) = (0, 0);
    let mut mismatches = Vec::new();
    for (i, [x, y]) in random_environments().iter().enumerate() {
        let stage_one = equalize_error_rates(x, y).map_err(|e| format!("env {i}: {e}"))?;
        let verdict = classify_dominance_default(&x.cost, &y.cost).map_err(|e| format!("env {i}: {e}"))?;
        let result = design_stakes_equal(x, y, stage_one.targets).map_err(|e| format!("env {i}: {e}"))?;
        match result {
            EqualStakesResult::InfeasibleDominance { .. } => {
                infeasible += 1;
                if !verdict.is_strict_dominance() {
                    mismatches.push(format!("env {i}: infeasible but verdict {verdict:?}"));
                }
            }
            EqualStakesResult::Feasible { r, .. } => {
                feasible += 1;
                if verdict.is_strict_dominance() {
                    mismatches.push(format!("env {i}: feasible but verdict {verdict:?}"));
                }
                let rules = stage_one.groups.clone().map(|g| g.rule);
                let out = solve_pair([x, y], [&rules[0], &rules[1]], [stakes_core::Stakes(r); 2])
                    .map_err(|e| format!("env {i}: {e}"))?;
                let gap = (out[0].prevalence - out[1].prevalence).abs();
                if gap > 1e-8 {
                    mismatches.push(format!("env {i}: prevalence gap {gap} at r = {r}"));
                }
            }
        }
    }
    check(mismatches.is_empty(), || format!("{} mismatches: {}", mismatches.len(), mismatches.join("; ")))?;
    Ok(format!("{infeasible} infeasible, {feasible} feasible, zero mismatches"))
}

fn criterion_6() -> Result<String, String> {
    let [x, y] = example((0.0, 1.0), (1.0, 1.0));
    let d = equalize_error_rates(&x, &y).map_err(|e| e.to_string())?;
    let rules = d.groups.clone().map(|g| g.rule);
    let grid: Vec<f64> = (0..101).map(|i| 10.0 * i as f64 / 100.0).collect();
    let rows = sweep_shared_stakes([&x, &y], [&rules[0], &rules[1]], &grid).map_err(|e| e.to_string())?;
    let gaps: Vec<f64> = rows.iter().map(|r| r.ppv_gap.ok_or("undefined PPV in sweep")).collect::<Result<_, _>>()?;
    let positive = gaps.iter().all(|g| *g > 0.0);
    let negative = gaps.iter().all(|g| *g < 0.0);
    check(positive || negative, || format!("PPV gap changes sign or vanishes: {gaps:?}"))?;
    let smallest = gaps.iter().map(|g| g.abs()).fold(f64::INFINITY, f64::min);
    Ok(format!("101 points, PPV gap {} throughout, min |gap| {smallest:.3e}", if positive { "> 0" } else { "< 0" }))
}

fn criterion_7() -> Result<String, String> {
    let [x, y] = example((0.0, 1.0), (1.0, 1.0));
    let d = run_mechanism(&x, &y, Mode::Theorem1, &MechanismOptions::default()).map_err(|e| e.to_string())?;
    let rules = d.rules();
    let n = 200_000;
    let run = || simulate([&x, &y], [&rules[0], &rules[1]], d.stakes, n, 7).map_err(|e| e.to_string());
    let first = run()?;
    let again = run()?;
    check(first == again, || "reruns with the same seed differ".into())?;
    let comparison = compare(&first, [&d.outcomes[0], &d.outcomes[1]]);
    let failed: Vec<String> = comparison
        .cells
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} {} z = {:?}", c.group, c.quantity, c.z))
        .collect();
    for q in ["tp", "fp", "fn", "tn", "prevalence", "tpr", "fpr"] {
        check(comparison.cells.iter().filter(|c| c.quantity == q).count() == 2, || format!("{q} not compared"))?;
    }
    check(comparison.pass, || format!("outside 4 sigma: {}", failed.join(", ")))?;
    Ok(format!("n = {n} per group, max |z| = {:.3}, reruns bit-identical", comparison.max_abs_z()))
}

fn criterion_8() -> Result<String, String> {
    let d = normal(0.0, 1.0);
    let mut worst_p = 0.0f64;
    let mut worst_x = 0.0f64;
    for i in 0..1000 {
        let p = (i as f64 + 0.5) / 1000.0;
        let q = d.quantile(p).map_err(|e| e.to_string())?;
        worst_p = worst_p.max((d.cdf(q) - p).abs());
        let x = -5.0 + 10.0 * i as f64 / 999.0;
        worst_x = worst_x.max((d.quantile(d.cdf(x)).map_err(|e| e.to_string())? - x).abs());
    }
    check(worst_p <= 1e-8 && worst_x <= 1e-8, || format!("round trip error p {worst_p:e}, x {worst_x:e}"))?;

    let mut pairs: Vec<(ContinuousDistribution, ContinuousDistribution)> =
        vec![(normal(0.0, 2.0), normal(1.0, 1.0)), (normal(0.0, 2.0), normal(-1.0, 1.0))];
    pairs.extend(random_environments().into_iter().map(|[x, y]| (x.cost, y.cost)));
    let (mut crossings, mut worst_h) = (0, 0.0f64);
    for (hx, hy) in &pairs {
        if let DominanceVerdict::Crossing { points } = classify_dominance_default(hx, hy).map_err(|e| e.to_string())? {
            for c in points {
                crossings += 1;
                worst_h = worst_h.max((hx.cdf(c) - hy.cdf(c)).abs());
            }
        }
        let (lo, hi) = default_dominance_bracket(hx, hy);
        check(lo < hi, || "empty dominance bracket".into())?;
    }
    check(worst_h <= 1e-10, || format!("crossing residual {worst_h:e}"))?;
    Ok(format!(
        "round trip max error p {worst_p:.1e}, x {worst_x:.1e}; {crossings} crossings, max |H^X - H^Y| {worst_h:.1e}"
    ))
}

type Criterion = (&'static str, Duration, fn() -> Result<String, String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 example 1 reproduction", Duration::from_secs(1), criterion_1),
        ("2 example 2 reproduction", Duration::from_secs(1), criterion_2),
        ("3 example 3 reproduction", Duration::from_secs(1), criterion_3),
        ("4 differential-stakes property suite", Duration::from_secs(30), criterion_4),
        ("5 equal-stakes dichotomy suite", Duration::from_secs(30), criterion_5),
        ("6 shared-stakes infeasibility sweep", Duration::from_secs(30), criterion_6),
        ("7 monte-carlo oracle", Duration::from_secs(10), criterion_7),
        ("8 numerics", Duration::from_secs(30), criterion_8),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            check(elapsed <= budget, || format!("took {elapsed:.2?}, budget {budget:?}")).map(|()| detail)
        });
        match result {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
