//! Continuous univariate distributions for compliance costs and signals.
//!
//! Two families are supported: the normal distribution and a continuous
//! piecewise-linear CDF given by knots. Both expose CDF, density, a
//! left-continuous generalized inverse and inverse-transform sampling. The
//! module also checks the signal ordering `F0(s) > F1(s)` and classifies a
//! pair of cost CDFs as ordered by first-order stochastic dominance or
//! crossing.

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margin a CDF difference must exceed before it counts as a strict ordering.
pub const DOMINANCE_EPS: f64 = 1e-9;
/// Grid resolution used when classifying dominance.
pub const DOMINANCE_GRID: usize = 4097;
/// Every reported crossing satisfies `|H^X - H^Y| <= CROSSING_TOL`.
pub const CROSSING_TOL: f64 = 1e-10;
/// Strictness margin for the signal ordering check.
pub const MLRP_TOL: f64 = 1e-12;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A compliance-cost or signal distribution.
///
/// JSON literal: `{"normal": {"mean": m, "sd": s}}` or
/// `{"piecewise": {"knots": [[x, p], ...]}}`. Literals are validated on
/// deserialization; values built by hand should go through
/// [`ContinuousDistribution::normal`] / [`ContinuousDistribution::piecewise`]
/// or call [`ContinuousDistribution::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", try_from = "RawDistribution")]
pub enum ContinuousDistribution {
    Normal {
        mean: f64,
        sd: f64,
    },
    /// Linear interpolation between knots `(x, p)`; `p` runs from 0 at the
    /// first knot to 1 at the last.
    #[serde(rename = "piecewise")]
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawDistribution {
    Normal { mean: f64, sd: f64 },
    Piecewise { knots: Vec<[f64; 2]> },
}

impl TryFrom<RawDistribution> for ContinuousDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Normal { mean, sd } => Self::normal(mean, sd),
            RawDistribution::Piecewise { knots } => Self::piecewise(knots),
        }
    }
}

impl ContinuousDistribution {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        let d = ContinuousDistribution::Normal { mean, sd };
        d.validate()?;
        Ok(d)
    }

    pub fn piecewise(knots: Vec<[f64; 2]>) -> Result<Self> {
        let d = ContinuousDistribution::PiecewiseLinear { knots };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ContinuousDistribution::Normal { mean, sd } => {
                if !mean.is_finite() {
                    return Err(Error::InvalidDistribution(format!("normal mean {mean} is not finite")));
                }
                if !(sd.is_finite() && *sd > 0.0) {
                    return Err(Error::InvalidDistribution(format!("normal sd must be finite and > 0, got {sd}")));
                }
            }
            ContinuousDistribution::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidDistribution("piecewise CDF needs at least two knots".into()));
                }
                for [x, p] in knots {
                    if !x.is_finite() || !(0.0..=1.0).contains(p) {
                        return Err(Error::InvalidDistribution(format!("bad knot ({x}, {p})")));
                    }
                }
                for w in knots.windows(2) {
                    if w[1][0] <= w[0][0] {
                        return Err(Error::InvalidDistribution("knot x values must be strictly increasing".into()));
                    }
                    if w[1][1] < w[0][1] {
                        return Err(Error::InvalidDistribution("knot probabilities must be non-decreasing".into()));
                    }
                }
                if knots[0][1] != 0.0 || knots[knots.len() - 1][1] != 1.0 {
                    return Err(Error::InvalidDistribution(
                        "piecewise CDF must start at probability 0 and end at 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ContinuousDistribution::Normal { mean, sd } => standard_normal_cdf((x - mean) / sd),
            ContinuousDistribution::PiecewiseLinear { knots } => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if x < first[0] {
                    return 0.0;
                }
                if x >= last[0] {
                    return 1.0;
                }
                // first knot with knot.x > x; exists and is >= 1 here
                let i = knots.partition_point(|k| k[0] <= x);
                let [x0, p0] = knots[i - 1];
                let [x1, p1] = knots[i];
                p0 + (p1 - p0) * (x - x0) / (x1 - x0)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            ContinuousDistribution::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                FRAC_1_SQRT_2PI * (-0.5 * z * z).exp() / sd
            }
            ContinuousDistribution::PiecewiseLinear { knots } => {
                if x < knots[0][0] || x >= knots[knots.len() - 1][0] {
                    return 0.0;
                }
                let i = knots.partition_point(|k| k[0] <= x);
                let [x0, p0] = knots[i - 1];
                let [x1, p1] = knots[i];
                (p1 - p0) / (x1 - x0)
            }
        }
    }

    /// `1 - cdf(x)`, computed directly for normals so the upper tail keeps
    /// its relative precision.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            ContinuousDistribution::Normal { mean, sd } => standard_normal_cdf((mean - x) / sd),
            ContinuousDistribution::PiecewiseLinear { .. } => 1.0 - self.cdf(x),
        }
    }

    /// Inverse of [`sf`](Self::sf): the quantile at `1 - q` without forming
    /// `1 - q`.
    pub fn isf(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::ProbabilityOutOfRange(q));
        }
        match self {
            ContinuousDistribution::Normal { mean, sd } => Ok(mean - sd * standard_normal_quantile(q)),
            ContinuousDistribution::PiecewiseLinear { .. } => self.quantile(1.0 - q),
        }
    }

    /// Smallest `x` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(match self {
            ContinuousDistribution::Normal { mean, sd } => mean + sd * standard_normal_quantile(p),
            ContinuousDistribution::PiecewiseLinear { knots } => {
                // first segment whose upper probability reaches p; its lower
                // probability is then < p, so the segment is strictly rising
                let i = knots.partition_point(|k| k[1] < p);
                let [x0, p0] = knots[i - 1];
                let [x1, p1] = knots[i];
                x0 + (p - p0) / (p1 - p0) * (x1 - x0)
            }
        })
    }

    /// Inverse-transform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u).expect("Open01 draws lie in (0, 1)")
    }

    /// Interval `[quantile(lo_p), quantile(hi_p)]`.
    pub fn quantile_range(&self, lo_p: f64, hi_p: f64) -> Result<(f64, f64)> {
        Ok((self.quantile(lo_p)?, self.quantile(hi_p)?))
    }
}

/// `Φ(z)` through the complementary error function.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Φ⁻¹ by bracketed bisection, seeded with a rational approximation so the
/// starting bracket is already narrow. Upper-half probabilities are mapped
/// through `Φ⁻¹(p) = -Φ⁻¹(1 - p)`, which is exact in floating point there
/// and pins the median at 0.
fn standard_normal_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        return -standard_normal_quantile(1.0 - p);
    }
    let guess = acklam_guess(p);
    let width = 1e-6 * guess.abs().max(1.0);
    generalized_inverse(standard_normal_cdf, p, guess - width, guess + width)
}

/// Smallest `x` (to machine resolution) with `cdf(x) >= p`, for a
/// non-decreasing `cdf`. The bracket is widened geometrically until
/// `cdf(lo) < p <= cdf(hi)`.
pub(crate) fn generalized_inverse<F: Fn(f64) -> f64>(cdf: F, p: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut step = (hi - lo).max(1e-6);
    while cdf(lo) >= p {
        lo -= step;
        step *= 2.0;
    }
    step = (hi - lo).max(1e-6);
    while cdf(hi) < p {
        hi += step;
        step *= 2.0;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if cdf(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

// Acklam's rational approximation to the normal quantile (relative error ~1e-9).
fn acklam_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] =
        [-5.447609879822406e1, 1.615858368580409e2, -1.556989798598866e2, 6.680131188771972e1, -1.328068155288572e1];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [7.784695709041462e-3, 3.224671290700398e-1, 2.445134137142996, 3.754408661907416];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Behavior-dependent signal distributions for one group: `f0` for
/// non-compliers, `f1` for compliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    pub f0: ContinuousDistribution,
    pub f1: ContinuousDistribution,
}

impl SignalModel {
    pub fn new(f0: ContinuousDistribution, f1: ContinuousDistribution) -> Self {
        SignalModel { f0, f1 }
    }

    /// Hull of the `lo_p`/`hi_p` quantiles of both behaviors.
    pub fn joint_hull(&self, lo_p: f64, hi_p: f64) -> Result<(f64, f64)> {
        joint_hull(&self.f0, &self.f1, lo_p, hi_p)
    }

    /// Uniform grid over the 0.001/0.999 joint quantile hull.
    pub fn default_grid(&self, n: usize) -> Result<Vec<f64>> {
        let (lo, hi) = self.joint_hull(0.001, 0.999)?;
        Ok(linspace(lo, hi, n))
    }
}

pub(crate) fn joint_hull(
    a: &ContinuousDistribution,
    b: &ContinuousDistribution,
    lo_p: f64,
    hi_p: f64,
) -> Result<(f64, f64)> {
    let (alo, ahi) = a.quantile_range(lo_p, hi_p)?;
    let (blo, bhi) = b.quantile_range(lo_p, hi_p)?;
    Ok((alo.min(blo), ahi.max(bhi)))
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
        }
    }
}

/// Outcome of [`verify_mlrp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlrpCheck {
    pub passes: bool,
    /// Smallest `F0(s) - F1(s)` over interior grid points (0 if none).
    pub worst_margin: f64,
    pub worst_at: Option<f64>,
    pub interior_points: usize,
}

/// Checks `F0(s) - F1(s) > MLRP_TOL` at every interior grid point.
///
/// A grid point is interior unless both CDFs are numerically saturated at 0
/// or at 1 there; in the saturated tails the ordering is indistinguishable
/// from equality in floating point.
pub fn verify_mlrp(model: &SignalModel, grid: &[f64]) -> MlrpCheck {
    let mut worst_margin = f64::INFINITY;
    let mut worst_at = None;
    let mut interior = 0;
    for &s in grid {
        let f0 = model.f0.cdf(s);
        let f1 = model.f1.cdf(s);
        let saturated = f0.max(f1) <= MLRP_TOL || f0.min(f1) >= 1.0 - MLRP_TOL;
        if saturated {
            continue;
        }
        interior += 1;
        let margin = f0 - f1;
        if margin < worst_margin {
            worst_margin = margin;
            worst_at = Some(s);
        }
    }
    if interior == 0 {
        return MlrpCheck { passes: false, worst_margin: 0.0, worst_at: None, interior_points: 0 };
    }
    MlrpCheck { passes: worst_margin > MLRP_TOL, worst_margin, worst_at, interior_points: interior }
}

/// First-order stochastic dominance relation between two cost CDFs `H^X`
/// (first) and `H^Y` (second).
///
/// "Dominates" refers to the costs: `SecondDominatesFirst` means
/// `H^Y < H^X` everywhere, so group Y faces uniformly higher costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DominanceVerdict {
    FirstDominatesSecond,
    SecondDominatesFirst,
    Crossing { points: Vec<f64> },
    IdenticalWithinTolerance,
}

impl DominanceVerdict {
    pub fn is_strict_dominance(&self) -> bool {
        matches!(self, DominanceVerdict::FirstDominatesSecond | DominanceVerdict::SecondDominatesFirst)
    }

    /// Verdict with the roles of the two distributions exchanged.
    pub fn swapped(&self) -> DominanceVerdict {
        match self {
            DominanceVerdict::FirstDominatesSecond => DominanceVerdict::SecondDominatesFirst,
            DominanceVerdict::SecondDominatesFirst => DominanceVerdict::FirstDominatesSecond,
            other => other.clone(),
        }
    }
}

/// Joint 0.0001/0.9999 quantile hull of two distributions.
pub fn default_dominance_bracket(hx: &ContinuousDistribution, hy: &ContinuousDistribution) -> (f64, f64) {
    joint_hull(hx, hy, 1e-4, 1.0 - 1e-4).expect("fixed probabilities lie in (0, 1)")
}

/// Classifies `(H^X, H^Y)` on a uniform grid over `bracket`.
///
/// Points where `|H^X - H^Y| <= DOMINANCE_EPS` carry no sign. Each sign
/// change between consecutive signed points is refined by bisection to a
/// crossing. If no point is signed the CDFs are identical within tolerance.
pub fn classify_dominance(
    hx: &ContinuousDistribution,
    hy: &ContinuousDistribution,
    bracket: (f64, f64),
    grid_n: usize,
) -> Result<DominanceVerdict> {
    let (lo, hi) = bracket;
    if grid_n < 2 {
        return Err(Error::InvalidGrid(format!("dominance grid needs at least 2 points, got {grid_n}")));
    }
    if lo >= hi || lo.is_nan() || hi.is_nan() || [hx, hy].iter().any(|h| h.cdf(lo) >= 0.001 || h.cdf(hi) <= 0.999) {
        return Err(Error::BracketTooNarrow { lo, hi });
    }

    let gap = |c: f64| hx.cdf(c) - hy.cdf(c);
    let mut positive = false;
    let mut negative = false;
    let mut crossings = Vec::new();
    // last signed grid point and its sign
    let mut last: Option<(f64, bool)> = None;
    for c in linspace(lo, hi, grid_n) {
        let d = gap(c);
        let sign = if d > DOMINANCE_EPS {
            Some(true)
        } else if d < -DOMINANCE_EPS {
            Some(false)
        } else {
            None
        };
        let Some(sign) = sign else { continue };
        if sign {
            positive = true;
        } else {
            negative = true;
        }
        if let Some((prev_c, prev_sign)) = last {
            if prev_sign != sign {
                crossings.push(refine_crossing(&gap, prev_c, c));
            }
        }
        last = Some((c, sign));
    }

    Ok(match (positive, negative) {
        (true, false) => DominanceVerdict::SecondDominatesFirst,
        (false, true) => DominanceVerdict::FirstDominatesSecond,
        (false, false) => DominanceVerdict::IdenticalWithinTolerance,
        (true, true) => DominanceVerdict::Crossing { points: crossings },
    })
}

/// [`classify_dominance`] over the default bracket and grid.
pub fn classify_dominance_default(
    hx: &ContinuousDistribution,
    hy: &ContinuousDistribution,
) -> Result<DominanceVerdict> {
    classify_dominance(hx, hy, default_dominance_bracket(hx, hy), DOMINANCE_GRID)
}

// Bisection for a root of `gap` given opposite signs at `a` and `b`.
fn refine_crossing<F: Fn(f64) -> f64>(gap: &F, a: f64, b: f64) -> f64 {
    let mut lo = a;
    let mut hi = b;
    let lo_positive = gap(lo) > 0.0;
    let mut best = if gap(lo).abs() <= gap(hi).abs() { lo } else { hi };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = gap(mid);
        if d.abs() < gap(best).abs() {
            best = mid;
        }
        if d == 0.0 {
            break;
        }
        if (d > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    debug_assert!(gap(best).abs() <= CROSSING_TOL);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn n(mean: f64, sd: f64) -> ContinuousDistribution {
        ContinuousDistribution::normal(mean, sd).unwrap()
    }

    fn flat_piecewise() -> ContinuousDistribution {
        ContinuousDistribution::piecewise(vec![[0.0, 0.0], [2.0, 0.6], [3.0, 0.6], [4.0, 1.0]]).unwrap()
    }

    // erf(z) = 2/sqrt(pi) * exp(-z^2) * sum_n 2^n z^(2n+1) / (2n+1)!!
    // All terms positive, so no cancellation.
    fn erf_series(z: f64) -> f64 {
        let mut term = z;
        let mut sum = z;
        let mut k = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            k += 1.0;
            term *= 2.0 * z * z / (2.0 * k + 1.0);
            sum += term;
        }
        2.0 / std::f64::consts::PI.sqrt() * (-z * z).exp() * sum
    }

    fn normal_cdf_oracle(x: f64) -> f64 {
        let e = erf_series(x.abs() / std::f64::consts::SQRT_2);
        if x >= 0.0 {
            0.5 + 0.5 * e
        } else {
            0.5 - 0.5 * e
        }
    }

    #[test]
    fn normal_cdf_examples() {
        assert_eq!(n(0.0, 1.0).cdf(0.0), 0.5);
        assert!((n(1.0, 1.0).cdf(0.0) - 0.158655).abs() < 1e-6);
        assert!((n(0.0, 2.0).cdf(2.0) - 0.841345).abs() < 1e-6);
    }

    #[test]
    fn normal_cdf_matches_series_oracle() {
        let d = n(0.0, 1.0);
        for i in 0..=1200 {
            let x = -6.0 + 0.01 * i as f64;
            let err = (d.cdf(x) - normal_cdf_oracle(x)).abs();
            assert!(err <= 1e-12, "x = {x}: err {err:e}");
        }
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(n(1.0, 1.0).quantile(0.5).unwrap(), 1.0);
        assert!((n(0.0, 1.0).quantile(0.841345).unwrap() - 1.0).abs() < 1e-5);
        assert_eq!(flat_piecewise().quantile(0.6).unwrap(), 2.0);
    }

    #[test]
    fn quantile_agrees_with_plain_bisection() {
        // independent oracle: bisection on [-40, 40] with no initial guess
        let d = n(0.3, 1.7);
        // upper tail excluded: the oracle cannot resolve cdf(x) near 1
        for &p in &[1e-9, 0.001, 0.2, 0.5, 0.841345, 0.999] {
            let (mut lo, mut hi) = (-40.0, 40.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if d.cdf(mid) >= p {
                    hi = mid
                } else {
                    lo = mid
                }
            }
            let q = d.quantile(p).unwrap();
            assert!((q - hi).abs() < 1e-9, "p = {p}: {q} vs {hi}");
            assert!((d.cdf(q) - p).abs() <= 1e-10);
        }
    }

    #[test]
    fn quantile_round_trips_in_both_tails() {
        let d = n(0.0, 1.0);
        for i in 0..1000 {
            let x = -8.0 + 16.0 * i as f64 / 999.0;
            // near 1 the cdf itself only resolves x to about 1e-16 / pdf(x)
            let slack = 1e-8_f64.max(4.0 * f64::EPSILON / d.pdf(x));
            assert!((d.quantile(d.cdf(x)).unwrap() - x).abs() <= slack, "x = {x}");
        }
        let q = d.quantile(1.0 - 1e-9).unwrap();
        assert!((d.cdf(q) - (1.0 - 1e-9)).abs() <= 1e-10);
    }

    #[test]
    fn survival_keeps_upper_tail() {
        let d = n(-3.0, 0.3);
        assert_eq!(d.cdf(0.0), 1.0);
        let tail = d.sf(0.0);
        assert!((tail / 7.619853024160527e-24 - 1.0).abs() < 1e-9, "{tail}");
        assert!((d.isf(tail).unwrap()).abs() < 1e-9);
        let other = n(1.0, 2.0);
        let x = other.isf(tail).unwrap();
        assert!((x - 21.0).abs() < 1e-8, "{x}");
        for x in [-2.0, 0.0, 0.7, 3.0] {
            let d = n(0.4, 1.3);
            assert!((d.sf(x) - (1.0 - d.cdf(x))).abs() < 1e-15);
            assert!((d.isf(d.sf(x)).unwrap() - x).abs() < 1e-9);
        }
        let pw = ContinuousDistribution::piecewise(vec![[0.0, 0.0], [1.0, 0.5], [3.0, 1.0]]).unwrap();
        assert_eq!(pw.sf(2.0), 0.25);
        assert_eq!(pw.isf(0.25).unwrap(), 2.0);
        assert!(pw.isf(0.0).is_err() && pw.isf(1.0).is_err());
    }

    #[test]
    fn quantile_rejects_closed_endpoints() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(n(0.0, 1.0).quantile(p), Err(Error::ProbabilityOutOfRange(_))));
            assert!(flat_piecewise().quantile(p).is_err());
        }
    }

    #[test]
    fn piecewise_cdf_and_pdf() {
        let d = flat_piecewise();
        assert_eq!(d.cdf(-1.0), 0.0);
        assert!((d.cdf(1.0) - 0.3).abs() < 1e-15);
        assert_eq!(d.cdf(2.5), 0.6);
        assert!((d.cdf(3.5) - 0.8).abs() < 1e-15);
        assert_eq!(d.cdf(4.0), 1.0);
        assert!((d.pdf(1.0) - 0.3).abs() < 1e-15);
        assert_eq!(d.pdf(2.5), 0.0);
        assert!((d.quantile(0.8).unwrap() - 3.5).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_literals() {
        assert!(ContinuousDistribution::normal(0.0, 0.0).is_err());
        assert!(ContinuousDistribution::normal(0.0, -1.0).is_err());
        assert!(ContinuousDistribution::piecewise(vec![[0.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(ContinuousDistribution::piecewise(vec![[0.0, 0.0], [1.0, 0.7], [2.0, 0.5], [3.0, 1.0]]).is_err());
        assert!(ContinuousDistribution::piecewise(vec![[0.0, 0.1], [1.0, 1.0]]).is_err());
        assert!(ContinuousDistribution::piecewise(vec![[0.0, 0.0], [1.0, 0.9]]).is_err());
    }

    #[test]
    fn json_literals() {
        let d: ContinuousDistribution = serde_json::from_str(r#"{"normal": {"mean": 1, "sd": 2}}"#).unwrap();
        assert_eq!(d, n(1.0, 2.0));
        let p: ContinuousDistribution =
            serde_json::from_str(r#"{"piecewise": {"knots": [[0, 0], [2, 0.6], [3, 0.6], [4, 1]]}}"#).unwrap();
        assert_eq!(p, flat_piecewise());
        assert_eq!(serde_json::to_string(&n(1.0, 2.0)).unwrap(), r#"{"normal":{"mean":1.0,"sd":2.0}}"#);
        assert!(serde_json::from_str::<ContinuousDistribution>(r#"{"normal": {"mean": 0, "sd": -1}}"#).is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        for d in [n(0.0, 1.0), flat_piecewise()] {
            let a: Vec<f64> = {
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                (0..100).map(|_| d.sample(&mut rng)).collect()
            };
            let b: Vec<f64> = {
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                (0..100).map(|_| d.sample(&mut rng)).collect()
            };
            assert_eq!(a, b);
        }
    }

    #[test]
    fn normal_sample_mean_within_clt_bound() {
        let d = n(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let count = 1_000_000;
        let mean = (0..count).map(|_| d.sample(&mut rng)).sum::<f64>() / count as f64;
        assert!(mean.abs() < 4.0 / (count as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn piecewise_sample_ks_statistic_small() {
        let d = flat_piecewise();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let count = 1_000_000;
        let mut xs: Vec<f64> = (0..count).map(|_| d.sample(&mut rng)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let nf = count as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = d.cdf(x);
                (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.002, "KS {ks}");
    }

    #[test]
    fn mlrp_examples() {
        let grid: Vec<f64> = (0..=800).map(|i| -4.0 + 0.01 * i as f64).collect();
        let good = SignalModel::new(n(0.0, 1.0), n(1.0, 1.0));
        assert!(verify_mlrp(&good, &grid).passes);

        let same = SignalModel::new(n(0.0, 1.0), n(0.0, 1.0));
        let check = verify_mlrp(&same, &grid);
        assert!(!check.passes);
        assert_eq!(check.worst_margin, 0.0);

        let reversed = SignalModel::new(n(1.0, 1.0), n(0.0, 1.0));
        let check = verify_mlrp(&reversed, &grid);
        assert!(!check.passes);
        assert!(check.worst_margin < 0.0);
    }

    #[test]
    fn mlrp_ignores_saturated_tails() {
        let model = SignalModel::new(n(0.0, 1.0), n(1.0, 1.0));
        let wide: Vec<f64> = (0..=400).map(|i| -50.0 + 0.25 * i as f64).collect();
        let check = verify_mlrp(&model, &wide);
        assert!(check.passes, "{check:?}");
        assert!(check.interior_points < wide.len());
    }

    #[test]
    fn dominance_examples() {
        let v = classify_dominance_default(&n(0.0, 1.0), &n(1.0, 1.0)).unwrap();
        assert_eq!(v, DominanceVerdict::SecondDominatesFirst);

        match classify_dominance_default(&n(0.0, 2.0), &n(1.0, 1.0)).unwrap() {
            DominanceVerdict::Crossing { points } => {
                assert_eq!(points.len(), 1);
                assert!((points[0] - 2.0).abs() < 1e-8, "{points:?}");
            }
            other => panic!("expected crossing, got {other:?}"),
        }
        match classify_dominance_default(&n(0.0, 2.0), &n(-1.0, 1.0)).unwrap() {
            DominanceVerdict::Crossing { points } => {
                assert_eq!(points.len(), 1);
                assert!((points[0] + 2.0).abs() < 1e-8, "{points:?}");
            }
            other => panic!("expected crossing, got {other:?}"),
        }
        assert_eq!(
            classify_dominance_default(&n(0.5, 1.3), &n(0.5, 1.3)).unwrap(),
            DominanceVerdict::IdenticalWithinTolerance
        );
    }

    #[test]
    fn dominance_rejects_narrow_bracket() {
        let err = classify_dominance(&n(0.0, 1.0), &n(1.0, 1.0), (-1.0, 1.0), 101).unwrap_err();
        assert!(matches!(err, Error::BracketTooNarrow { .. }));
        assert!(classify_dominance(&n(0.0, 1.0), &n(1.0, 1.0), (-10.0, 10.0), 1).is_err());
    }

    #[test]
    fn dominance_with_piecewise_crossing() {
        // uniform(0, 4) against a CDF that is steeper early and flatter late
        let u = ContinuousDistribution::piecewise(vec![[0.0, 0.0], [4.0, 1.0]]).unwrap();
        let v = ContinuousDistribution::piecewise(vec![[0.0, 0.0], [1.0, 0.5], [4.0, 1.0]]).unwrap();
        assert_eq!(
            classify_dominance(&u, &v, (-1.0, 5.0), DOMINANCE_GRID).unwrap(),
            DominanceVerdict::FirstDominatesSecond
        );
        let w = ContinuousDistribution::piecewise(vec![[0.0, 0.0], [1.0, 0.5], [3.0, 0.5], [4.0, 1.0]]).unwrap();
        match classify_dominance(&u, &w, (-1.0, 5.0), DOMINANCE_GRID).unwrap() {
            DominanceVerdict::Crossing { points } => {
                assert_eq!(points.len(), 1);
                assert!((points[0] - 2.0).abs() < 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }
}
