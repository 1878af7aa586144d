//! Reward distributions: finite-support laws on `[0, 1]` and canonical
//! one-parameter exponential families indexed by their mean.

use rand::Rng;
use rand_distr::{Distribution as _, Normal, Poisson};

use crate::error::{Error, Result};

/// Atoms closer than this are merged at construction.
pub const ATOM_MERGE_TOL: f64 = 1e-12;
/// Allowed deviation of the weight total from one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A one-parameter exponential family, parameterized by the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Bernoulli,
    Gaussian { sigma2: f64 },
    Poisson,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Bernoulli => "bernoulli",
            Family::Gaussian { .. } => "gaussian",
            Family::Poisson => "poisson",
        }
    }

    /// Whether `mean` lies in the open mean interval of the family.
    pub fn admits_mean(&self, mean: f64) -> bool {
        match self {
            Family::Bernoulli => mean > 0.0 && mean < 1.0,
            Family::Gaussian { .. } => mean.is_finite(),
            Family::Poisson => mean > 0.0 && mean.is_finite(),
        }
    }

    /// Closure of the mean interval, as `(lower, upper)`.
    pub fn mean_closure(&self) -> (f64, f64) {
        match self {
            Family::Bernoulli => (0.0, 1.0),
            Family::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Poisson => (0.0, f64::INFINITY),
        }
    }

    /// Mean-parameterized divergence `d(x, mu) = KL(P_x, P_mu)`.
    ///
    /// `mu` must be in the open mean interval; `x` may sit on the closure,
    /// where the limit value is returned (`-ln` of the boundary atom mass).
    /// Outside the closure the divergence is `+inf`.
    pub fn divergence(&self, x: f64, mu: f64) -> f64 {
        let (lo, hi) = self.mean_closure();
        if x < lo || x > hi {
            return f64::INFINITY;
        }
        match *self {
            Family::Bernoulli => xlogy_ratio(x, mu) + xlogy_ratio(1.0 - x, 1.0 - mu),
            Family::Gaussian { sigma2 } => (x - mu) * (x - mu) / (2.0 * sigma2),
            Family::Poisson => xlogy_ratio(x, mu) - x + mu,
        }
    }

    /// Natural-parameter offset taking mean `mu` to mean `x`; the maximizing
    /// tilt in the Fenchel-Legendre transform.
    pub(crate) fn tilt_between(&self, x: f64, mu: f64) -> f64 {
        match *self {
            Family::Bernoulli => logit(x) - logit(mu),
            Family::Gaussian { sigma2 } => (x - mu) / sigma2,
            Family::Poisson => (x / mu).ln(),
        }
    }
}

/// `a ln(a / b)` with the convention `0 ln 0 = 0`.
fn xlogy_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * (a / b).ln()
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// A member of an exponential family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFamily {
    family: Family,
    mean: f64,
}

impl ExpFamily {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// A distribution with finitely many atoms in `[0, 1]`.
///
/// Atoms are strictly increasing and carry positive weight; zero-weight atoms
/// are dropped and atoms within [`ATOM_MERGE_TOL`] of each other are merged
/// when the value is built.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSupport {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl FiniteSupport {
    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum()
    }

    /// Weight of the atom located exactly at `x`, if any.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .position(|&a| a == x)
            .map_or(0.0, |i| self.weights[i])
    }

    /// Builds from pre-validated parts, dropping zero weights and
    /// renormalizing. Used for tilts, where weights come from a softmax.
    pub(crate) fn from_normalized_parts(atoms: &[f64], weights: &[f64]) -> Self {
        let total: f64 = weights.iter().sum();
        let (atoms, weights) = atoms
            .iter()
            .zip(weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&a, &w)| (a, w / total))
            .unzip();
        FiniteSupport { atoms, weights }
    }
}

/// A reward distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Finite(FiniteSupport),
    Exp(ExpFamily),
}

/// Mean and support ends of a distribution, with the mass each end carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInfo {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_mass: f64,
    pub upper_mass: f64,
}

impl Distribution {
    /// Finite-support distribution on `[0, 1]`.
    pub fn finite(atoms: &[f64], weights: &[f64]) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::invalid(format!(
                "atoms and weights differ in length ({} vs {})",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.is_empty() {
            return Err(Error::invalid("finite distribution needs at least one atom"));
        }
        for (i, (&a, &w)) in atoms.iter().zip(weights).enumerate() {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::invalid(format!("atom {i} = {a} is outside [0, 1]")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("weight {i} = {w} is not a probability")));
            }
        }
        for pair in atoms.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::invalid(format!(
                    "atoms must be strictly increasing ({} then {})",
                    pair[0], pair[1]
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }

        let mut merged_atoms: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (&a, &w) in atoms.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            match merged_atoms.last() {
                Some(&prev) if a - prev < ATOM_MERGE_TOL => {
                    *merged_weights.last_mut().unwrap() += w;
                }
                _ => {
                    merged_atoms.push(a);
                    merged_weights.push(w);
                }
            }
        }
        if merged_atoms.is_empty() {
            return Err(Error::invalid("all weights are zero"));
        }
        Ok(Distribution::Finite(FiniteSupport {
            atoms: merged_atoms,
            weights: merged_weights,
        }))
    }

    /// Point mass at `x`.
    pub fn dirac(x: f64) -> Result<Self> {
        Self::finite(&[x], &[1.0])
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::exp_family(Family::Bernoulli, p)
    }

    pub fn gaussian(mean: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::invalid(format!("sigma2 = {sigma2} must be positive")));
        }
        Self::exp_family(Family::Gaussian { sigma2 }, mean)
    }

    pub fn poisson(mean: f64) -> Result<Self> {
        Self::exp_family(Family::Poisson, mean)
    }

    pub fn exp_family(family: Family, mean: f64) -> Result<Self> {
        if let Family::Gaussian { sigma2 } = family {
            if !(sigma2 > 0.0 && sigma2.is_finite()) {
                return Err(Error::invalid(format!("sigma2 = {sigma2} must be positive")));
            }
        }
        if !family.admits_mean(mean) {
            return Err(Error::invalid(format!(
                "mean {mean} is outside the open mean interval of the {} family",
                family.name()
            )));
        }
        Ok(Distribution::Exp(ExpFamily { family, mean }))
    }

    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Finite(f) => f.mean(),
            Distribution::Exp(e) => e.mean,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteSupport> {
        match self {
            Distribution::Finite(f) => Some(f),
            Distribution::Exp(_) => None,
        }
    }

    pub fn as_exp(&self) -> Option<&ExpFamily> {
        match self {
            Distribution::Exp(e) => Some(e),
            Distribution::Finite(_) => None,
        }
    }

    /// Short model label: `finite`, `bernoulli`, `gaussian` or `poisson`.
    pub fn model_name(&self) -> &'static str {
        match self {
            Distribution::Finite(_) => "finite",
            Distribution::Exp(e) => e.family.name(),
        }
    }

    /// True when both distributions live in the same model (same variant,
    /// same family, same variance for Gaussians).
    pub fn same_model(&self, other: &Distribution) -> bool {
        match (self, other) {
            (Distribution::Finite(_), Distribution::Finite(_)) => true,
            (Distribution::Exp(a), Distribution::Exp(b)) => a.family == b.family,
            _ => false,
        }
    }

    /// Whether every member of this distribution's model is supported in `[0, 1]`.
    pub fn is_unit_supported(&self) -> bool {
        matches!(
            self,
            Distribution::Finite(_)
                | Distribution::Exp(ExpFamily {
                    family: Family::Bernoulli,
                    ..
                })
        )
    }

    pub fn support(&self) -> SupportInfo {
        match self {
            Distribution::Finite(f) => SupportInfo {
                mean: f.mean(),
                lower: f.atoms[0],
                upper: *f.atoms.last().unwrap(),
                lower_mass: f.weights[0],
                upper_mass: *f.weights.last().unwrap(),
            },
            Distribution::Exp(e) => match e.family {
                Family::Bernoulli => SupportInfo {
                    mean: e.mean,
                    lower: 0.0,
                    upper: 1.0,
                    lower_mass: 1.0 - e.mean,
                    upper_mass: e.mean,
                },
                Family::Gaussian { .. } => SupportInfo {
                    mean: e.mean,
                    lower: f64::NEG_INFINITY,
                    upper: f64::INFINITY,
                    lower_mass: 0.0,
                    upper_mass: 0.0,
                },
                Family::Poisson => SupportInfo {
                    mean: e.mean,
                    lower: 0.0,
                    upper: f64::INFINITY,
                    lower_mass: (-e.mean).exp(),
                    upper_mass: 0.0,
                },
            },
        }
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Finite(f) => {
                if f.atoms.len() == 1 {
                    return f.atoms[0];
                }
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (a, w) in f.atoms.iter().zip(&f.weights) {
                    acc += w;
                    if u < acc {
                        return *a;
                    }
                }
                *f.atoms.last().unwrap()
            }
            Distribution::Exp(e) => match e.family {
                Family::Bernoulli => {
                    if rng.random::<f64>() < e.mean {
                        1.0
                    } else {
                        0.0
                    }
                }
                Family::Gaussian { sigma2 } => Normal::new(e.mean, sigma2.sqrt())
                    .expect("validated variance")
                    .sample(rng),
                Family::Poisson => Poisson::new(e.mean)
                    .expect("validated mean")
                    .sample(rng),
            },
        }
    }

    /// `n` i.i.d. draws.
    pub fn sample_batch<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match self {
            Distribution::Exp(ExpFamily {
                family: Family::Gaussian { sigma2 },
                mean,
            }) => {
                let normal = Normal::new(*mean, sigma2.sqrt()).expect("validated variance");
                (0..n).map(|_| normal.sample(rng)).collect()
            }
            _ => (0..n).map(|_| self.sample(rng)).collect(),
        }
    }
}

/// Kullback-Leibler divergence `KL(p, q)`, `+inf` when `p` is not
/// absolutely continuous with respect to `q`.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    match (p, q) {
        (Distribution::Finite(p), Distribution::Finite(q)) => {
            let mut total = 0.0;
            for (&a, &w) in p.atoms.iter().zip(&p.weights) {
                let qw = q.mass_at(a);
                if qw == 0.0 {
                    return Ok(f64::INFINITY);
                }
                total += w * (w / qw).ln();
            }
            Ok(total.max(0.0))
        }
        (Distribution::Exp(a), Distribution::Exp(b)) if a.family == b.family => {
            Ok(a.family.divergence(a.mean, b.mean))
        }
        _ => Err(Error::invalid(format!(
            "KL between different models ({} vs {})",
            p.model_name(),
            q.model_name()
        ))),
    }
}
