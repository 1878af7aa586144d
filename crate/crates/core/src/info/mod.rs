//! Information-theoretic complexity quantities.
//!
//! Everything here is a pure function of immutable inputs:
//!
//! * [`log_mgf`] and [`fenchel_dual`]: the log moment-generating function
//!   `φ_ν(λ)` and its Fenchel-Legendre transform `φ*_ν(x)`;
//! * [`linf`]: the four constrained KL infima `L_inf^{<,≤,>,≥}(x, ν)`;
//! * [`tilt`]: exponential reweighting of a finite-support distribution;
//! * [`pair_rate`]: `L(ν', ν) = inf_x {L_inf^≥(x, ν') + L_inf^≤(x, ν)}`,
//!   the rate at which two sample means swap order;
//! * [`chernoff_d`]: classical Chernoff information for exponential families;
//! * [`gap_lower_bounds`]: gap-based floors on the above for `[0, 1]` models.
//!
//! All logarithms are natural.

mod search;

pub(crate) use search::{bisect_increasing, convex_min_closed, golden_min};

use serde::Serialize;

use crate::dist::{Distribution, ExpFamily, Family, FiniteSupport};
use crate::error::{Error, Result};
use search::golden_max;

/// Largest exponent `|λ| (M(ν) − m(ν))` explored when maximizing
/// `λx − φ(λ)`; `|λ|` itself for unbounded supports.
pub const LAMBDA_GUARD: f64 = 700.0;

fn lambda_guard(lower: f64, upper: f64) -> f64 {
    let width = upper - lower;
    if width.is_finite() && width > 0.0 {
        LAMBDA_GUARD / width.min(1.0)
    } else {
        LAMBDA_GUARD
    }
}

/// How a [`RateValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMethod {
    ClosedFormD,
    DualityTilt,
    AtomFormula,
    InfiniteBySupport,
}

/// A nonnegative rate, possibly `+inf`.
///
/// `attained_at` is the optimizing tilt `λ` for transforms and `L_inf`
/// values, or the optimizing threshold `x` for pairwise rates. It is `None`
/// when the value is infinite or the optimum sits at a support end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateValue {
    #[serde(with = "crate::rate_json")]
    pub value: f64,
    pub attained_at: Option<f64>,
    pub method: RateMethod,
}

impl RateValue {
    fn infinite() -> Self {
        RateValue {
            value: f64::INFINITY,
            attained_at: None,
            method: RateMethod::InfiniteBySupport,
        }
    }

    fn atom(mass: f64) -> Self {
        if mass > 0.0 {
            RateValue {
                value: -mass.ln(),
                attained_at: None,
                method: RateMethod::AtomFormula,
            }
        } else {
            Self::infinite()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Which side of `x` the constrained mean must lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `E(ζ) < x` (strict) or `E(ζ) ≤ x` (weak).
    Below,
    /// `E(ζ) > x` (strict) or `E(ζ) ≥ x` (weak).
    Above,
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `φ_ν(λ) = ln E[e^{λX}]`.
pub fn log_mgf(d: &Distribution, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    match d {
        Distribution::Finite(f) => log_sum_exp(
            f.atoms()
                .iter()
                .zip(f.weights())
                .map(|(x, w)| w.ln() + lambda * x),
        ),
        Distribution::Exp(e) => match e.family() {
            Family::Bernoulli => {
                let p = e.mean();
                log_add_exp((1.0 - p).ln(), p.ln() + lambda)
            }
            Family::Gaussian { sigma2 } => lambda * e.mean() + 0.5 * lambda * lambda * sigma2,
            Family::Poisson => e.mean() * lambda.exp_m1(),
        },
    }
}

/// `φ'_ν(λ)`, the mean of the distribution tilted by `e^{λx}`.
pub fn tilted_mean(d: &Distribution, lambda: f64) -> f64 {
    match d {
        Distribution::Finite(f) => {
            let logs: Vec<f64> = f
                .atoms()
                .iter()
                .zip(f.weights())
                .map(|(x, w)| w.ln() + lambda * x)
                .collect();
            let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut num = 0.0;
            let mut den = 0.0;
            for (x, l) in f.atoms().iter().zip(&logs) {
                let w = (l - m).exp();
                num += w * x;
                den += w;
            }
            num / den
        }
        Distribution::Exp(e) => match e.family() {
            Family::Bernoulli => {
                let p = e.mean();
                let z = (p / (1.0 - p)).ln() + lambda;
                1.0 / (1.0 + (-z).exp())
            }
            Family::Gaussian { sigma2 } => e.mean() + lambda * sigma2,
            Family::Poisson => e.mean() * lambda.exp(),
        },
    }
}

/// `φ*_ν(x) = sup_λ {λx − φ_ν(λ)}`.
///
/// Exponential families use the closed form `d(x, E(ν))` on the closure of
/// the mean interval. Finite-support distributions go through
/// [`fenchel_dual_numeric`].
pub fn fenchel_dual(d: &Distribution, x: f64) -> RateValue {
    match d {
        Distribution::Exp(e) => exp_family_dual(e, x),
        Distribution::Finite(_) => fenchel_dual_numeric(d, x),
    }
}

fn exp_family_dual(e: &ExpFamily, x: f64) -> RateValue {
    let family = e.family();
    let (lo, hi) = family.mean_closure();
    if x < lo || x > hi {
        return RateValue::infinite();
    }
    if !family.admits_mean(x) {
        // boundary of the closure: the limit is -ln of the boundary atom
        let s = Distribution::Exp(*e).support();
        return RateValue::atom(if x == s.lower { s.lower_mass } else { s.upper_mass });
    }
    RateValue {
        value: family.divergence(x, e.mean()),
        attained_at: Some(family.tilt_between(x, e.mean())),
        method: RateMethod::ClosedFormD,
    }
}

/// `φ*_ν(x)` by direct maximization of the concave `Λ(λ) = λx − φ_ν(λ)`.
///
/// Support ends are handled first: `+inf` outside `[m(ν), M(ν)]`, `−ln`
/// of the end atom's mass at `m(ν)` or `M(ν)`. Otherwise the bracket
/// `[−1, 1]` is doubled on the side of the optimum until `Λ'` changes sign or
/// `|λ|` reaches the guard (see [`LAMBDA_GUARD`]), then refined by golden
/// section to relative width `1e-12`.
pub fn fenchel_dual_numeric(d: &Distribution, x: f64) -> RateValue {
    let s = d.support();
    if x.is_nan() || x < s.lower || x > s.upper {
        return RateValue::infinite();
    }
    if x == s.mean {
        return RateValue {
            value: 0.0,
            attained_at: Some(0.0),
            method: RateMethod::DualityTilt,
        };
    }
    if x == s.lower {
        return RateValue::atom(s.lower_mass);
    }
    if x == s.upper {
        return RateValue::atom(s.upper_mass);
    }
    let guard = lambda_guard(s.lower, s.upper);
    let dir = if x > s.mean { 1.0 } else { -1.0 };
    let mut far = dir;
    while (x - tilted_mean(d, far)) * dir > 0.0 && far.abs() < guard {
        far *= 2.0;
    }
    let far = far.clamp(-guard, guard);
    let objective = |lambda: f64| lambda * x - log_mgf(d, lambda);
    let (a, b) = if far < 0.0 { (far, 0.0) } else { (0.0, far) };
    let (mut arg, mut best) = golden_max(objective, a, b, 1e-12);
    let at_far = objective(far);
    if at_far > best {
        arg = far;
        best = at_far;
    }
    RateValue {
        value: best.max(0.0),
        attained_at: Some(arg),
        method: RateMethod::DualityTilt,
    }
}

/// `L_inf` in any of its four variants.
///
/// The weak variants equal `φ*_ν(x)` on the relevant side of the mean and 0
/// on the other. The strict variants coincide with the weak ones except at
/// the support end itself (`x = m(ν)` below, `x = M(ν)` above), where no
/// absolutely continuous `ζ` has a strictly smaller (larger) mean and the
/// value is `+inf`.
pub fn linf(d: &Distribution, x: f64, side: Side, strict: bool) -> RateValue {
    let s = d.support();
    let trivial = RateValue {
        value: 0.0,
        attained_at: Some(0.0),
        method: match d {
            Distribution::Exp(_) => RateMethod::ClosedFormD,
            Distribution::Finite(_) => RateMethod::DualityTilt,
        },
    };
    match side {
        Side::Below => {
            if strict && x <= s.lower {
                RateValue::infinite()
            } else if x >= s.mean {
                trivial
            } else {
                fenchel_dual(d, x)
            }
        }
        Side::Above => {
            if strict && x >= s.upper {
                RateValue::infinite()
            } else if x <= s.mean {
                trivial
            } else {
                fenchel_dual(d, x)
            }
        }
    }
}

/// Exponential tilt of a finite-support distribution: weights proportional to
/// `w_i e^{λ x_i}`. The tilted mean equals `φ'_ν(λ)`.
pub fn tilt(d: &Distribution, lambda: f64) -> Result<Distribution> {
    let f = d.as_finite().ok_or_else(|| {
        Error::invalid("tilting is only defined here for finite-support distributions")
    })?;
    Ok(Distribution::Finite(tilt_finite(f, lambda)))
}

fn tilt_finite(f: &FiniteSupport, lambda: f64) -> FiniteSupport {
    let logs: Vec<f64> = f
        .atoms()
        .iter()
        .zip(f.weights())
        .map(|(x, w)| w.ln() + lambda * x)
        .collect();
    let norm = log_sum_exp(logs.iter().copied());
    let weights: Vec<f64> = logs.iter().map(|l| (l - norm).exp()).collect();
    FiniteSupport::from_normalized_parts(f.atoms(), &weights)
}

fn check_pair(worse: &Distribution, better: &Distribution) -> Result<()> {
    if !worse.same_model(better) {
        return Err(Error::invalid(format!(
            "distributions are from different models ({} vs {})",
            worse.model_name(),
            better.model_name()
        )));
    }
    if worse.mean() >= better.mean() {
        return Err(Error::invalid(format!(
            "expected E(worse) < E(better), got {} >= {}",
            worse.mean(),
            better.mean()
        )));
    }
    Ok(())
}

/// Pairwise rate `L(ν', ν) = Φ(ν', ν)` for `E(ν') < E(ν)`, with the
/// minimizing threshold in `attained_at`.
///
/// Outside `[m(ν), M(ν')]` one of the two transforms is infinite, so the
/// search runs over `[E(ν'), E(ν)] ∩ [m(ν), M(ν')]`; an empty intersection
/// (separated supports) gives `+inf`, and a single point (supports touching
/// at a shared atom) gives the sum of the two atom formulas.
pub fn pair_rate(worse: &Distribution, better: &Distribution) -> Result<RateValue> {
    check_pair(worse, better)?;
    let sw = worse.support();
    let sb = better.support();
    let lo = sw.mean.max(sb.lower);
    let hi = sb.mean.min(sw.upper);
    if lo > hi {
        return Ok(RateValue::infinite());
    }
    let sum = |x: f64| fenchel_dual(worse, x).value + fenchel_dual(better, x).value;
    let (x, value) = convex_min_closed(sum, lo, hi);
    if !value.is_finite() {
        return Ok(RateValue::infinite());
    }
    let method = if lo == hi {
        RateMethod::AtomFormula
    } else if matches!(worse, Distribution::Exp(_)) {
        RateMethod::ClosedFormD
    } else {
        RateMethod::DualityTilt
    };
    Ok(RateValue {
        value,
        attained_at: Some(x),
        method,
    })
}

/// Chernoff information `D(μ', μ) = d(y, μ)` where `d(y, μ') = d(y, μ)`,
/// found by bisection on the increasing difference over `[μ', μ]`.
pub fn chernoff_d(worse: &Distribution, better: &Distribution) -> Result<RateValue> {
    let (Some(w), Some(b)) = (worse.as_exp(), better.as_exp()) else {
        return Err(Error::invalid("Chernoff information needs exponential-family arms"));
    };
    check_pair(worse, better)?;
    let family = w.family();
    let (mu_w, mu_b) = (w.mean(), b.mean());
    let diff = |y: f64| family.divergence(y, mu_w) - family.divergence(y, mu_b);
    let (lo, hi) = bisect_increasing(diff, mu_w, mu_b);
    let y = 0.5 * (lo + hi);
    Ok(RateValue {
        value: family.divergence(y, mu_b),
        attained_at: Some(y),
        method: RateMethod::ClosedFormD,
    })
}

/// Gap floors for `[0, 1]`-supported models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapFloors {
    /// `2Δ²`, a floor for each weak `L_inf` at distance `Δ` from the mean.
    pub pinsker: f64,
    /// `Δ²`, a floor for the pairwise rate.
    pub hoeffding_phi: f64,
}

pub fn gap_lower_bounds(worse: &Distribution, better: &Distribution) -> Result<GapFloors> {
    if !worse.is_unit_supported() || !better.is_unit_supported() || !worse.same_model(better) {
        return Err(Error::invalid(
            "gap floors hold for [0, 1]-supported models (finite or Bernoulli) only",
        ));
    }
    let gap = better.mean() - worse.mean();
    if gap < 0.0 {
        return Err(Error::invalid("expected E(worse) <= E(better)"));
    }
    Ok(GapFloors {
        pinsker: 2.0 * gap * gap,
        hoeffding_phi: gap * gap,
    })
}
