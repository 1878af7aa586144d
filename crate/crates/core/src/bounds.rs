//! Upper and lower bounds on `lim (1/T) ln P(I_T ≠ a*)`.
//!
//! All values are rates: nonpositive reals or `−inf`. Ranks `k`, `j` are
//! 1-based positions in the decreasing-mean order (rank 1 is the best arm);
//! `ν*` is the best arm's distribution and `ν_(k)`, `μ_(k)` the rank-`k`
//! arm's distribution and mean.
//!
//! The successive-rejects upper bounds use the weak `L_inf` variants through
//! [`pair_rate`]; the lower bounds use the strict ones. The two differ only
//! when the best arm's lowest atom coincides with another arm's highest atom,
//! and such arms are listed in [`BoundReport::atom_boundary_arms`].

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{kl_divergence, Distribution, Family};
use crate::error::{Error, Result};
use crate::info::{
    bisect_increasing, convex_min_closed, golden_min, linf, pair_rate, Side,
};
use crate::problem::BanditProblem;
use crate::schedule::overline_ln;

/// Which `L_inf` variant (or other quantity) produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Weak,
    Strict,
    GapSquared,
    Formula,
}

/// Optimizing indices of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Argmin {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arm: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
}

impl Argmin {
    fn rank(problem: &BanditProblem, k: usize) -> Self {
        Argmin {
            k: Some(k),
            arm: Some(problem.ranked(k)),
            j: None,
            x: None,
        }
    }
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    #[serde(with = "crate::rate_json")]
    pub value: f64,
    pub variant: Variant,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin: Option<Argmin>,
    /// `C_D` for the gap bound, `C(ν)` for the Gaussian alternative bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

impl BoundValue {
    fn new(value: f64, variant: Variant, argmin: Option<Argmin>) -> Self {
        BoundValue {
            value,
            variant,
            argmin,
            constant: None,
            budget: None,
            caveat: None,
        }
    }
}

/// Lower bound `f` on the pairwise rate used to order arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateFloor {
    /// `f = Φ = L`.
    Phi,
    /// `f = Δ²`, valid on `[0, 1]`-supported models.
    GapSquared,
}

/// An arm and its `f(ν_a, ν*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderedArm {
    pub arm: usize,
    #[serde(with = "crate::rate_json")]
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cor3Bound {
    pub bound: BoundValue,
    /// `σ_1, …, σ_K`: arms by increasing `f(·, ν*)`, the best arm first.
    pub ordering: Vec<OrderedArm>,
}

/// `−(1/ov-ln K) min_{2≤k≤K} f(ν_{σ_k}, ν*) / k`.
pub fn ub_cor3(problem: &BanditProblem, floor: RateFloor) -> Result<Cor3Bound> {
    problem.require_unique_best("the successive-rejects upper bound")?;
    let best = problem.best_arm();
    let star = problem.arm(best);
    if floor == RateFloor::GapSquared && !star.is_unit_supported() {
        return Err(Error::invalid(
            "the gap-squared floor needs a [0, 1]-supported model (finite or bernoulli)",
        ));
    }
    let mut ordering = (0..problem.k())
        .map(|a| {
            let f = if a == best {
                0.0
            } else {
                match floor {
                    RateFloor::Phi => pair_rate(problem.arm(a), star)?.value,
                    RateFloor::GapSquared => problem.gaps()[a].powi(2),
                }
            };
            Ok(OrderedArm { arm: a, f })
        })
        .collect::<Result<Vec<_>>>()?;
    ordering.sort_by(|a, b| a.f.total_cmp(&b.f).then(a.arm.cmp(&b.arm)));
    let mut min = f64::INFINITY;
    let mut argmin = None;
    for (i, o) in ordering.iter().enumerate().skip(1) {
        let v = o.f / (i + 1) as f64;
        if v < min {
            min = v;
            argmin = Some(Argmin {
                k: Some(i + 1),
                arm: Some(o.arm),
                j: None,
                x: None,
            });
        }
    }
    let variant = match floor {
        RateFloor::Phi => Variant::Weak,
        RateFloor::GapSquared => Variant::GapSquared,
    };
    Ok(Cor3Bound {
        bound: BoundValue::new(-min / overline_ln(problem.k()), variant, argmin),
        ordering,
    })
}

/// `−min_{2≤k≤K} L_inf^<(μ_(k), ν*) / k`.
pub fn lb_thm7(problem: &BanditProblem) -> Result<BoundValue> {
    problem.require_generic("the balanced lower bound")?;
    let star = problem.arm(problem.best_arm());
    let mut min = f64::INFINITY;
    let mut argmin = None;
    for k in 2..=problem.k() {
        let mu = problem.means()[problem.ranked(k)];
        let v = linf(star, mu, Side::Below, true).value / k as f64;
        if v < min {
            min = v;
            argmin = Some(Argmin {
                x: Some(mu),
                ..Argmin::rank(problem, k)
            });
        }
    }
    Ok(BoundValue::new(-min, Variant::Strict, argmin))
}

struct Inner {
    value: f64,
    x: Option<f64>,
}

// inf over x in [lo, hi] ∩ (m(ν*), M(ν_k)) of the weak-variant sum
// a·L(x, ν_k, above) + b·L(x, ν*, below), which equals the strict-variant
// infimum by continuity of the transforms on the support.
fn thm12_inner(worse: &Distribution, star: &Distribution, lo: f64, hi: f64, a: f64, b: f64) -> Inner {
    let m_star = star.support().lower;
    let m_worse = worse.support().upper;
    let lo_f = lo.max(m_star);
    let hi_f = hi.min(m_worse);
    let open_lo = m_star >= lo;
    let open_hi = m_worse <= hi;
    let empty = lo_f > hi_f || (lo_f == hi_f && (open_lo || open_hi));
    if empty {
        return Inner {
            value: f64::INFINITY,
            x: None,
        };
    }
    let f = |x: f64| {
        a * linf(worse, x, Side::Above, false).value + b * linf(star, x, Side::Below, false).value
    };
    let (x, value) = convex_min_closed(f, lo_f, hi_f);
    Inner { value, x: Some(x) }
}

/// `−min_{2≤k≤K} min_{2≤j≤k} inf_{x∈[μ_(j), μ_(j−1))}
/// {L_inf^>(x, ν_(k))/(j−1) + L_inf^<(x, ν*)/j}`.
///
/// The open right end is evaluated at `μ_(j−1) − 1e-9 (μ* − μ_(K))`.
pub fn lb_thm12(problem: &BanditProblem) -> Result<BoundValue> {
    problem.require_generic("the monotonous lower bound")?;
    let kk = problem.k();
    let star = problem.arm(problem.best_arm());
    let mean_of = |r: usize| problem.means()[problem.ranked(r)];
    let range = mean_of(1) - mean_of(kk);
    let pairs: Vec<(usize, usize)> = (2..=kk).flat_map(|k| (2..=k).map(move |j| (k, j))).collect();
    let best = pairs
        .par_iter()
        .map(|&(k, j)| {
            let worse = problem.arm(problem.ranked(k));
            let lo = mean_of(j);
            let hi = mean_of(j - 1) - 1e-9 * range;
            let inner = thm12_inner(worse, star, lo, hi, 1.0 / (j - 1) as f64, 1.0 / j as f64);
            (inner.value, k, j, inner.x)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX, None),
            // ties resolved by (k, j) so the result does not depend on scheduling
            |p, q| if (q.0, q.1, q.2) < (p.0, p.1, p.2) { q } else { p },
        );
    let argmin = (best.1 != usize::MAX).then(|| Argmin {
        j: Some(best.2),
        x: best.3,
        ..Argmin::rank(problem, best.1)
    });
    Ok(BoundValue::new(-best.0, Variant::Strict, argmin))
}

// inf over x in [μ_k, μ*] of max{L_inf^>(x, ν_k), L_inf^<(x, ν*)}, by
// bisection on the crossing of the increasing first term and the decreasing
// second one.
fn crossing_inf(worse: &Distribution, star: &Distribution) -> Inner {
    let lo = worse.mean().max(star.support().lower);
    let hi = star.mean().min(worse.support().upper);
    let open_lo = star.support().lower >= worse.mean();
    let open_hi = worse.support().upper <= star.mean();
    if lo > hi || (lo == hi && (open_lo || open_hi)) {
        return Inner {
            value: f64::INFINITY,
            x: None,
        };
    }
    let up = |x: f64| linf(worse, x, Side::Above, false).value;
    let down = |x: f64| linf(star, x, Side::Below, false).value;
    let (a, b) = bisect_increasing(|x| up(x) - down(x), lo, hi);
    let mut best = Inner {
        value: f64::INFINITY,
        x: None,
    };
    for x in [a, b, lo, hi] {
        let v = up(x).max(down(x));
        if v < best.value {
            best = Inner { value: v, x: Some(x) };
        }
    }
    best
}

/// `−min_{k≠a*} inf_{x∈[μ_k, μ*]} max{L_inf^>(x, ν_k), L_inf^<(x, ν*)}`.
pub fn lb_thm13(problem: &BanditProblem) -> Result<BoundValue> {
    problem.require_generic("the pairwise consistency lower bound")?;
    let best = problem.best_arm();
    let star = problem.arm(best);
    let mut min = f64::INFINITY;
    let mut argmin = None;
    for k in 2..=problem.k() {
        let inner = crossing_inf(problem.arm(problem.ranked(k)), star);
        if inner.value < min {
            min = inner.value;
            argmin = Some(Argmin {
                x: inner.x,
                ..Argmin::rank(problem, k)
            });
        }
    }
    Ok(BoundValue::new(-min, Variant::Strict, argmin))
}

/// Two-armed lower bound `−inf_{x∈[μ_2, μ*]} max{L_inf^>(x, ν_2), L_inf^<(x, ν*)}`,
/// computed by golden-section search on the maximum itself.
pub fn two_arm(problem: &BanditProblem) -> Result<BoundValue> {
    if problem.k() != 2 {
        return Err(Error::invalid(format!(
            "the two-armed lower bound needs K = 2, got {}",
            problem.k()
        )));
    }
    problem.require_generic("the two-armed lower bound")?;
    let star = problem.arm(problem.best_arm());
    let worse = problem.arm(problem.worst_arm());
    let lo = worse.mean().max(star.support().lower);
    let hi = star.mean().min(worse.support().upper);
    let open = star.support().lower >= worse.mean() || worse.support().upper <= star.mean();
    if lo > hi || (lo == hi && open) {
        return Ok(BoundValue::new(f64::NEG_INFINITY, Variant::Strict, None));
    }
    let g = |x: f64| {
        linf(worse, x, Side::Above, false)
            .value
            .max(linf(star, x, Side::Below, false).value)
    };
    let (mut x, mut v) = golden_min(g, lo, hi, 1e-15);
    for end in [lo, hi] {
        let ve = g(end);
        if ve < v {
            (x, v) = (end, ve);
        }
    }
    Ok(BoundValue::new(
        -v,
        Variant::Strict,
        Some(Argmin {
            x: Some(x),
            ..Argmin::rank(problem, 2)
        }),
    ))
}

/// `−5 C_D min_{2≤k≤K} Δ_(k)² / k`.
pub fn lb_gap_abm10(problem: &BanditProblem, c_d: f64) -> Result<BoundValue> {
    if !(c_d > 0.0 && c_d.is_finite()) {
        return Err(Error::invalid(format!("C_D must be a positive real, got {c_d}")));
    }
    problem.require_generic("the gap-based lower bound")?;
    let mut min = f64::INFINITY;
    let mut argmin = None;
    for k in 2..=problem.k() {
        let v = problem.gaps()[problem.ranked(k)].powi(2) / k as f64;
        if v < min {
            min = v;
            argmin = Some(Argmin::rank(problem, k));
        }
    }
    let mut b = BoundValue::new(-5.0 * c_d * min, Variant::GapSquared, argmin);
    b.constant = Some(c_d);
    Ok(b)
}

/// `C_D` with `KL ≤ C_D Δ²` on the model spanned by the problem's arms:
/// `1/(2p(1−p))` for Bernoulli arms in `[p, 1−p]`, `1/(2σ²)` for Gaussians.
pub fn model_c_d(problem: &BanditProblem) -> Option<f64> {
    match problem.arm(0).as_exp()?.family() {
        Family::Bernoulli => {
            let p = problem
                .means()
                .iter()
                .map(|&m| m.min(1.0 - m))
                .fold(f64::INFINITY, f64::min);
            Some(1.0 / (2.0 * p * (1.0 - p)))
        }
        Family::Gaussian { sigma2 } => Some(1.0 / (2.0 * sigma2)),
        Family::Poisson => None,
    }
}

const BH_CAVEAT: &str =
    "bounds the larger of the error probabilities on the problem and on its alternative";

/// `−(Σ_a 1/KL(ν_a, ζ_a))⁻¹ − ln 4 / T` over the suboptimal arms `a`, given
/// one alternative `ζ_a` with `E(ζ_a) > μ*` per suboptimal arm (in arm
/// order). `budget = None` gives the `T → ∞` limit.
pub fn bh_bounds(
    problem: &BanditProblem,
    alternatives: &[Distribution],
    budget: Option<u64>,
) -> Result<BoundValue> {
    problem.require_unique_best("the alternative-instance lower bound")?;
    let best = problem.best_arm();
    let suboptimal: Vec<usize> = (0..problem.k()).filter(|&a| a != best).collect();
    if alternatives.len() != suboptimal.len() {
        return Err(Error::invalid(format!(
            "expected {} alternatives (one per suboptimal arm), got {}",
            suboptimal.len(),
            alternatives.len()
        )));
    }
    if budget == Some(0) {
        return Err(Error::invalid("budget must be positive"));
    }
    let mut inv_sum = 0.0;
    for (&a, zeta) in suboptimal.iter().zip(alternatives) {
        if zeta.mean() <= problem.best_mean() {
            return Err(Error::invalid(format!(
                "alternative for arm {a} has mean {} <= best mean {}",
                zeta.mean(),
                problem.best_mean()
            )));
        }
        inv_sum += 1.0 / kl_divergence(problem.arm(a), zeta)?;
    }
    let tail = budget.map_or(0.0, |t| 4f64.ln() / t as f64);
    let mut b = BoundValue::new(-1.0 / inv_sum - tail, Variant::Formula, None);
    b.budget = budget;
    b.caveat = Some(BH_CAVEAT.to_string());
    Ok(b)
}

/// `C(ν) = Σ_{a≠a*} 2σ²/Δ_a²` for Gaussian problems.
pub fn gaussian_c_of_nu(problem: &BanditProblem) -> Result<f64> {
    let sigma2 = match problem.arm(0).as_exp().map(|e| e.family()) {
        Some(Family::Gaussian { sigma2 }) => sigma2,
        _ => return Err(Error::invalid("C(ν) is defined for Gaussian problems only")),
    };
    problem.require_unique_best("C(ν)")?;
    let best = problem.best_arm();
    Ok((0..problem.k())
        .filter(|&a| a != best)
        .map(|a| 2.0 * sigma2 / problem.gaps()[a].powi(2))
        .sum())
}

/// Gaussian alternative bound `−4/C(ν) − ln 4 / T`, obtained from
/// [`bh_bounds`] with `ζ_a` of mean `μ* + Δ_a`.
pub fn bh_gaussian(problem: &BanditProblem, budget: Option<u64>) -> Result<BoundValue> {
    let c = gaussian_c_of_nu(problem)?;
    let sigma2 = match problem.arm(0).as_exp().unwrap().family() {
        Family::Gaussian { sigma2 } => sigma2,
        _ => unreachable!(),
    };
    let best = problem.best_arm();
    let alternatives = (0..problem.k())
        .filter(|&a| a != best)
        .map(|a| Distribution::gaussian(problem.best_mean() + problem.gaps()[a], sigma2))
        .collect::<Result<Vec<_>>>()?;
    let mut b = bh_bounds(problem, &alternatives, budget)?;
    b.constant = Some(c);
    Ok(b)
}

const CL16_CAVEAT: &str =
    "existence-only: holds along some budgets for some problem of the family, not for this one";

/// `−(30 / ln K) (Σ_{a≠a*} 1/Δ_a²)⁻¹` for Bernoulli problems with
/// `K ≥ 3` and parameters in `[1/4, 3/4]`.
pub fn cl16_value(problem: &BanditProblem) -> Result<BoundValue> {
    let k = problem.k();
    if k < 3 {
        return Err(Error::invalid(format!("needs K >= 3 arms, got {k}")));
    }
    if !matches!(problem.arm(0).as_exp().map(|e| e.family()), Some(Family::Bernoulli)) {
        return Err(Error::invalid("defined for the Bernoulli model only"));
    }
    if let Some(m) = problem.means().iter().find(|m| !(0.25..=0.75).contains(*m)) {
        return Err(Error::invalid(format!("Bernoulli parameter {m} is outside [1/4, 3/4]")));
    }
    problem.require_generic("this bound")?;
    let best = problem.best_arm();
    let h: f64 = (0..k)
        .filter(|&a| a != best)
        .map(|a| 1.0 / problem.gaps()[a].powi(2))
        .sum();
    let mut b = BoundValue::new(-(30.0 / (k as f64).ln()) / h, Variant::Formula, None);
    b.caveat = Some(CL16_CAVEAT.to_string());
    Ok(b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBounds {
    pub cor3_phi: Option<BoundValue>,
    pub cor3_gap: Option<BoundValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBounds {
    pub thm7: Option<BoundValue>,
    pub thm12: Option<BoundValue>,
    pub thm13: Option<BoundValue>,
    pub gap_lb_abm10: Option<BoundValue>,
    pub two_arm: Option<BoundValue>,
    pub bh_value: Option<BoundValue>,
    pub cl16_value: Option<BoundValue>,
}

/// A bound that was not evaluated, and why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub bound: String,
    pub reason: String,
}

/// Every applicable bound for one problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub problem_digest: String,
    pub model: String,
    pub k: usize,
    pub generic: bool,
    pub unique_best: bool,
    pub overline_ln_k: f64,
    /// Arms by increasing `Φ(·, ν*)`, from the `Φ`-based upper bound.
    pub ordering: Option<Vec<OrderedArm>>,
    pub upper: UpperBounds,
    pub lower: LowerBounds,
    /// Arms whose highest atom equals the best arm's lowest atom; weak and
    /// strict bounds are not compared on them.
    pub atom_boundary_arms: Vec<usize>,
    pub skipped: Vec<Skipped>,
}

/// Arms `k` with `M(ν_k) = m(ν*)` where both ends carry an atom.
pub fn atom_boundary_arms(problem: &BanditProblem) -> Vec<usize> {
    let best = problem.best_arm();
    let s = problem.arm(best).support();
    (0..problem.k())
        .filter(|&a| a != best)
        .filter(|&a| {
            let o = problem.arm(a).support();
            o.upper == s.lower && o.upper_mass > 0.0 && s.lower_mass > 0.0
        })
        .collect()
}

/// Evaluates every bound applicable to `problem`. The alternative-instance
/// bound is computed for Gaussian problems at `budget` (or its limit).
pub fn compute_bounds(problem: &BanditProblem, budget: Option<u64>) -> BoundReport {
    let mut skipped = Vec::new();
    let mut keep = |name: &str, r: Result<BoundValue>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            skipped.push(Skipped {
                bound: name.to_string(),
                reason: e.to_string(),
            });
            None
        }
    };
    let phi = ub_cor3(problem, RateFloor::Phi);
    let ordering = phi.as_ref().ok().map(|c| c.ordering.clone());
    let upper = UpperBounds {
        cor3_phi: keep("cor3_phi", phi.map(|c| c.bound)),
        cor3_gap: keep("cor3_gap", ub_cor3(problem, RateFloor::GapSquared).map(|c| c.bound)),
    };
    let abm10 = match model_c_d(problem) {
        Some(c) => lb_gap_abm10(problem, c),
        None => Err(Error::invalid(format!(
            "no constant C_D is available for the {} model",
            problem.model_name()
        ))),
    };
    let lower = LowerBounds {
        thm7: keep("thm7", lb_thm7(problem)),
        thm12: keep("thm12", lb_thm12(problem)),
        thm13: keep("thm13", lb_thm13(problem)),
        gap_lb_abm10: keep("gap_lb_abm10", abm10),
        two_arm: keep("two_arm", two_arm(problem)),
        bh_value: keep("bh_value", bh_gaussian(problem, budget)),
        cl16_value: keep("cl16_value", cl16_value(problem)),
    };
    BoundReport {
        problem_digest: problem.digest(),
        model: problem.model_name().to_string(),
        k: problem.k(),
        generic: problem.is_generic(),
        unique_best: problem.has_unique_best(),
        overline_ln_k: overline_ln(problem.k()),
        ordering,
        upper,
        lower,
        atom_boundary_arms: atom_boundary_arms(problem),
        skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::analyze_problem;
    use approx::assert_abs_diff_eq;

    fn bern(ps: &[f64]) -> BanditProblem {
        analyze_problem(ps.iter().map(|&p| Distribution::bernoulli(p).unwrap()).collect()).unwrap()
    }

    fn gauss(ms: &[f64]) -> BanditProblem {
        analyze_problem(ms.iter().map(|&m| Distribution::gaussian(m, 1.0).unwrap()).collect()).unwrap()
    }

    // independent Bernoulli kl
    fn kl(x: f64, y: f64) -> f64 {
        x * (x / y).ln() + (1.0 - x) * ((1.0 - x) / (1.0 - y)).ln()
    }

    #[test]
    fn cor3_examples() {
        let g = ub_cor3(&bern(&[0.7, 0.5, 0.3]), RateFloor::GapSquared).unwrap();
        assert_abs_diff_eq!(g.bound.value, -0.015, epsilon = 1e-15);
        assert_eq!(g.ordering.iter().map(|o| o.arm).collect::<Vec<_>>(), vec![0, 1, 2]);

        let p = ub_cor3(&gauss(&[1.0, 0.0]), RateFloor::Phi).unwrap();
        assert_abs_diff_eq!(p.bound.value, -0.125, epsilon = 1e-12);

        let sep = analyze_problem(vec![
            Distribution::finite(&[0.6, 1.0], &[0.5, 0.5]).unwrap(),
            Distribution::finite(&[0.0, 0.4], &[0.5, 0.5]).unwrap(),
        ])
        .unwrap();
        let s = ub_cor3(&sep, RateFloor::Phi).unwrap();
        assert_eq!(s.bound.value, f64::NEG_INFINITY);
        assert!(ub_cor3(&bern(&[0.5, 0.5]), RateFloor::Phi).is_err());
        assert!(ub_cor3(&gauss(&[1.0, 0.0]), RateFloor::GapSquared).is_err());
    }

    #[test]
    fn thm7_examples() {
        let b = lb_thm7(&bern(&[0.7, 0.5, 0.3])).unwrap();
        assert_abs_diff_eq!(b.value, -kl(0.5, 0.7) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.value, -0.0435884, epsilon = 1e-7);
        assert_eq!(b.argmin.unwrap().k, Some(2));
        assert_abs_diff_eq!(lb_thm7(&gauss(&[1.0, 0.0])).unwrap().value, -0.25, epsilon = 1e-15);
        assert!(lb_thm7(&bern(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn thm12_examples() {
        let g = lb_thm12(&gauss(&[1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(g.value, -1.0 / 6.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g.argmin.unwrap().x.unwrap(), 1.0 / 3.0, epsilon = 1e-5);

        let p = bern(&[0.7, 0.3]);
        let b = lb_thm12(&p).unwrap();
        // 1e-5 grid scan of the inner objective
        let scan = (0..40_000)
            .map(|i| 0.3 + i as f64 * 1e-5)
            .map(|x| kl(x, 0.3) + kl(x, 0.7) / 2.0)
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(b.value, -scan, epsilon = 1e-8);
        assert!(b.value >= -0.1694596);
        assert!(b.value >= lb_thm7(&p).unwrap().value);
    }

    #[test]
    fn thm13_and_two_arm() {
        let g = gauss(&[1.0, 0.0]);
        assert_abs_diff_eq!(lb_thm13(&g).unwrap().value, -0.125, epsilon = 1e-12);
        let b = bern(&[0.25, 0.75]);
        let t13 = lb_thm13(&b).unwrap();
        assert_abs_diff_eq!(t13.value, -0.1438410, epsilon = 1e-7);
        assert_abs_diff_eq!(two_arm(&b).unwrap().value, t13.value, epsilon = 1e-8);
        assert!(two_arm(&bern(&[0.7, 0.5, 0.3])).is_err());
    }

    #[test]
    fn gap_bound_examples() {
        let p = bern(&[0.7, 0.5, 0.3]);
        let c = 1.0 / (2.0 * 0.25 * 0.75);
        assert_abs_diff_eq!(lb_gap_abm10(&p, c).unwrap().value, -0.2666667, epsilon = 1e-7);
        assert_abs_diff_eq!(lb_gap_abm10(&gauss(&[1.0, 0.0]), 0.5).unwrap().value, -1.25, epsilon = 1e-15);
        assert!(lb_gap_abm10(&p, 0.0).is_err());
        assert!(lb_thm7(&p).unwrap().value >= lb_gap_abm10(&p, c).unwrap().value);
        assert_abs_diff_eq!(model_c_d(&p).unwrap(), 1.0 / (2.0 * 0.3 * 0.7), epsilon = 1e-15);
    }

    #[test]
    fn bh_examples() {
        let g = gauss(&[1.0, 0.5, 0.0]);
        assert_abs_diff_eq!(gaussian_c_of_nu(&g).unwrap(), 10.0, epsilon = 1e-12);
        let b = bh_gaussian(&g, Some(100)).unwrap();
        assert_abs_diff_eq!(b.value, -0.4138629, epsilon = 1e-7);
        assert_abs_diff_eq!(bh_gaussian(&g, None).unwrap().value, -0.4, epsilon = 1e-12);
        assert!(b.caveat.is_some());

        // two alternatives with KL = 1 each
        let two = gauss(&[0.0, -1.0, -1.0]);
        let alts = vec![
            Distribution::gaussian(f64::sqrt(2.0) - 1.0, 1.0).unwrap(),
            Distribution::gaussian(f64::sqrt(2.0) - 1.0, 1.0).unwrap(),
        ];
        assert_abs_diff_eq!(bh_bounds(&two, &alts, None).unwrap().value, -0.5, epsilon = 1e-12);
        let bad = vec![Distribution::gaussian(-0.5, 1.0).unwrap(); 2];
        assert!(bh_bounds(&two, &bad, None).is_err());
        assert!(gaussian_c_of_nu(&bern(&[0.6, 0.4])).is_err());
    }

    #[test]
    fn cl16_examples() {
        let p = bern(&[0.75, 0.5, 0.25]);
        let v = cl16_value(&p).unwrap().value;
        assert_abs_diff_eq!(v, -(30.0 / 3f64.ln()) / 20.0, epsilon = 1e-12);
        let half = bern(&[0.75, 0.625, 0.5]);
        assert_abs_diff_eq!(cl16_value(&half).unwrap().value, v / 4.0, epsilon = 1e-12);
        assert!(cl16_value(&bern(&[0.6, 0.4])).is_err());
        assert!(cl16_value(&bern(&[0.9, 0.5, 0.3])).is_err());
    }

    #[test]
    fn full_report() {
        let r = compute_bounds(&bern(&[0.7, 0.5, 0.3]), None);
        assert!(r.upper.cor3_phi.is_some() && r.upper.cor3_gap.is_some());
        assert!(r.lower.two_arm.is_none() && r.lower.bh_value.is_none());
        assert!(r.lower.cl16_value.is_some());
        assert_eq!(r.skipped.len(), 2);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"thm7\""));
        assert!(r.atom_boundary_arms.is_empty());
    }

    #[test]
    fn atom_boundary_flag() {
        let p = analyze_problem(vec![
            Distribution::finite(&[0.5, 1.0], &[0.25, 0.75]).unwrap(),
            Distribution::finite(&[0.0, 0.5], &[0.5, 0.5]).unwrap(),
        ])
        .unwrap();
        assert_eq!(atom_boundary_arms(&p), vec![1]);
        let r = compute_bounds(&p, None);
        // weak: both atoms reachable; strict: no feasible threshold
        assert!(r.upper.cor3_phi.unwrap().value.is_finite());
        assert_eq!(r.lower.thm13.unwrap().value, f64::NEG_INFINITY);
    }
}
