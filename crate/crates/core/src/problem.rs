//! Bandit problems and the JSON problem-file format.
//!
//! Arm indices are zero-based everywhere in the API. Order statistics are
//! exposed through [`BanditProblem::order`], where `order()[0]` is the best
//! arm and `order()[K - 1]` the worst, exact mean ties broken by lower index.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dist::{Distribution, Family};
use crate::error::{Error, Result};

/// A `K`-armed bandit problem with its derived statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditProblem {
    arms: Vec<Distribution>,
    means: Vec<f64>,
    gaps: Vec<f64>,
    order: Vec<usize>,
    generic: bool,
}

/// Builds a [`BanditProblem`] from its arms.
pub fn analyze_problem(arms: Vec<Distribution>) -> Result<BanditProblem> {
    if arms.len() < 2 {
        return Err(Error::invalid(format!(
            "a bandit problem needs at least 2 arms, got {}",
            arms.len()
        )));
    }
    if let Some(i) = arms.iter().position(|a| !a.same_model(&arms[0])) {
        return Err(Error::invalid(format!(
            "arm {i} ({}) is not in the same model as arm 0 ({})",
            arms[i].model_name(),
            arms[0].model_name()
        )));
    }
    let means: Vec<f64> = arms.iter().map(Distribution::mean).collect();
    let mut order: Vec<usize> = (0..arms.len()).collect();
    // stable: equal means keep ascending index
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]));
    let best_mean = means[order[0]];
    let gaps = means.iter().map(|m| best_mean - m).collect();
    let generic = order.windows(2).all(|w| means[w[0]] != means[w[1]]);
    Ok(BanditProblem {
        arms,
        means,
        gaps,
        order,
        generic,
    })
}

impl BanditProblem {
    pub fn new(arms: Vec<Distribution>) -> Result<Self> {
        analyze_problem(arms)
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[Distribution] {
        &self.arms
    }

    pub fn arm(&self, a: usize) -> &Distribution {
        &self.arms[a]
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// `Δ_a = μ* − μ_a`.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Arms sorted by decreasing mean.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Arm with the `rank`-th largest mean, `rank` starting at 1.
    pub fn ranked(&self, rank: usize) -> usize {
        self.order[rank - 1]
    }

    pub fn best_arm(&self) -> usize {
        self.order[0]
    }

    pub fn worst_arm(&self) -> usize {
        *self.order.last().unwrap()
    }

    pub fn best_mean(&self) -> f64 {
        self.means[self.order[0]]
    }

    /// All means pairwise distinct (exact comparison).
    pub fn is_generic(&self) -> bool {
        self.generic
    }

    /// Exactly one arm attains the largest mean.
    pub fn has_unique_best(&self) -> bool {
        self.means[self.order[1]] != self.best_mean()
    }

    pub fn model_name(&self) -> &'static str {
        self.arms[0].model_name()
    }

    pub(crate) fn require_generic(&self, what: &str) -> Result<()> {
        if self.generic {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{what} requires a generic problem (pairwise distinct means)"
            )))
        }
    }

    pub(crate) fn require_unique_best(&self, what: &str) -> Result<()> {
        if self.has_unique_best() {
            Ok(())
        } else {
            Err(Error::invalid(format!("{what} requires a unique optimal arm")))
        }
    }

    /// Serializable description of the problem.
    pub fn to_spec(&self) -> ProblemSpec {
        ProblemSpec::from_problem(self)
    }

    /// Hex SHA-256 of the compact JSON problem description.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(&self.to_spec()).expect("problem spec serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Model tag of a problem file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Finite,
    Bernoulli,
    Gaussian,
    Poisson,
}

/// One arm of a problem file: a mean for parametric models, atoms and
/// weights for the finite model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArmSpec {
    Mean(f64),
    Finite { atoms: Vec<f64>, weights: Vec<f64> },
}

/// The problem-file schema:
/// `{"model": "finite"|"bernoulli"|"gaussian"|"poisson", "sigma2": number, "arms": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    pub arms: Vec<ArmSpec>,
}

impl ProblemSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::config(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Config { location, message } => Error::Config {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn build(&self) -> Result<BanditProblem> {
        let family = match self.model {
            ModelKind::Finite => None,
            ModelKind::Bernoulli => Some(Family::Bernoulli),
            ModelKind::Poisson => Some(Family::Poisson),
            ModelKind::Gaussian => {
                let sigma2 = self
                    .sigma2
                    .ok_or_else(|| Error::config("sigma2", "gaussian model requires sigma2"))?;
                Some(Family::Gaussian { sigma2 })
            }
        };
        if self.sigma2.is_some() && self.model != ModelKind::Gaussian {
            return Err(Error::config("sigma2", "only the gaussian model takes sigma2"));
        }
        let arms = self
            .arms
            .iter()
            .enumerate()
            .map(|(i, arm)| {
                let at = |e: Error| Error::config(format!("arms[{i}]"), e.to_string());
                match (family, arm) {
                    (None, ArmSpec::Finite { atoms, weights }) => {
                        Distribution::finite(atoms, weights).map_err(at)
                    }
                    (Some(f), ArmSpec::Mean(m)) => Distribution::exp_family(f, *m).map_err(at),
                    (None, ArmSpec::Mean(_)) => Err(Error::config(
                        format!("arms[{i}]"),
                        "finite model arms need {\"atoms\": [...], \"weights\": [...]}",
                    )),
                    (Some(_), ArmSpec::Finite { .. }) => Err(Error::config(
                        format!("arms[{i}]"),
                        "parametric model arms are plain means",
                    )),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        analyze_problem(arms).map_err(|e| Error::config("arms", e.to_string()))
    }

    fn from_problem(problem: &BanditProblem) -> Self {
        let (model, sigma2) = match problem.arm(0) {
            Distribution::Finite(_) => (ModelKind::Finite, None),
            Distribution::Exp(e) => match e.family() {
                Family::Bernoulli => (ModelKind::Bernoulli, None),
                Family::Poisson => (ModelKind::Poisson, None),
                Family::Gaussian { sigma2 } => (ModelKind::Gaussian, Some(sigma2)),
            },
        };
        let arms = problem
            .arms()
            .iter()
            .map(|d| match d {
                Distribution::Finite(f) => ArmSpec::Finite {
                    atoms: f.atoms().to_vec(),
                    weights: f.weights().to_vec(),
                },
                Distribution::Exp(e) => ArmSpec::Mean(e.mean()),
            })
            .collect();
        ProblemSpec {
            model,
            sigma2,
            arms,
        }
    }
}
