//! Monte Carlo estimation of misidentification and flip probabilities, log
//! slope fits, and consistency verdicts against the bounds.
//!
//! Verdicts compare a finite-budget slope with asymptotic rates, so they are
//! consistency checks with an additive slack `half_width + 2 / T_max`, never
//! a verification of a limit. With `R` replications, error rates below
//! about `ln(1/R) / T` cannot be resolved by plain Monte Carlo.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{compute_bounds, BoundReport, BoundValue};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::info::pair_rate;
use crate::problem::{BanditProblem, ProblemSpec};
use crate::stream::child_rng;
use crate::strategy::{empirical_frequency_checks, run_strategy, FrequencyReport, StrategyKind};

/// Error estimate at one budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisidEstimate {
    pub budget: u64,
    pub errors: u64,
    pub replications: u64,
    pub p_hat: f64,
    /// `sqrt(p̂ (1 − p̂) / R)`.
    pub stderr: f64,
    pub wall_clock_ms: f64,
}

fn binomial(count: u64, r: u64) -> (f64, f64) {
    let p = count as f64 / r as f64;
    (p, (p * (1.0 - p) / r as f64).sqrt())
}

/// Fraction of `replications` runs whose recommendation is not the best
/// arm (lowest index among ties). Replication `i` at budget `t` uses the
/// stream `child_rng(master_seed, t, i)`.
pub fn estimate_misid_prob(
    problem: &BanditProblem,
    kind: StrategyKind,
    t: u64,
    replications: u64,
    master_seed: u64,
) -> Result<MisidEstimate> {
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    let min = kind.min_budget(problem.k())?;
    if t < min {
        return Err(Error::invalid(format!(
            "budget T = {t} is too small for {} with K = {}; minimum is {min}",
            kind.name(),
            problem.k()
        )));
    }
    let start = Instant::now();
    let best = problem.best_arm();
    let errors = (0..replications)
        .into_par_iter()
        .map(|rep| {
            run_strategy(kind, problem, t, child_rng(master_seed, t, rep))
                .map(|tr| u64::from(tr.recommendation != best))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (p_hat, stderr) = binomial(errors, replications);
    Ok(MisidEstimate {
        budget: t,
        errors,
        replications,
        p_hat,
        stderr,
        wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Least-squares fit of `ln p̂` on the budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Twice the standard error of the slope.
    pub half_width: f64,
    pub cells_used: usize,
    pub cells_dropped: usize,
}

/// Fits `ln p = intercept + slope · T` on the cells with `p > 0`.
pub fn slope_fit(grid: &[(f64, f64)]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|&(t, p)| (t, p.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData {
            positive: pts.len(),
            largest_usable: pts.iter().map(|p| p.0 as u64).max(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("slope fit needs at least two distinct budgets"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let se = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        half_width: 2.0 * se,
        cells_used: pts.len(),
        cells_dropped: grid.len() - pts.len(),
    })
}

/// Flip estimate at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlipCell {
    pub n: u64,
    pub flips: u64,
    pub replications: u64,
    pub p_hat: f64,
    pub stderr: f64,
    /// `ln p̂ / N`, `-inf` when no flip was observed.
    #[serde(with = "crate::rate_json")]
    pub log_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlipReport {
    pub master_seed: u64,
    pub cells: Vec<FlipCell>,
    /// `Φ(worse, better)`.
    #[serde(with = "crate::rate_json")]
    pub pair_rate: f64,
    pub fit: Option<SlopeFit>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// `half_width + 2 / N_max`, when a fit exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Whether the fitted slope is at most `−Φ + tolerance`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistent: Option<bool>,
}

/// Estimates `P(Ȳ_N ≤ X̄_N)` for `X ~ worse`, `Y ~ better` on each `N` of the
/// grid and compares the fitted log slope with `−Φ(worse, better)`.
/// Replication `i` at size `N` uses `child_rng(master_seed, N, i)`.
pub fn flip_prob_experiment(
    worse: &Distribution,
    better: &Distribution,
    n_grid: &[u64],
    replications: u64,
    master_seed: u64,
) -> Result<FlipReport> {
    let phi = pair_rate(worse, better)?.value;
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(Error::invalid("sample sizes must be a nonempty list of positive integers"));
    }
    let cells: Vec<FlipCell> = n_grid
        .iter()
        .map(|&n| {
            let flips = (0..replications)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = child_rng(master_seed, n, rep);
                    let mut x = 0.0;
                    let mut y = 0.0;
                    for _ in 0..n {
                        x += worse.sample(&mut rng);
                        y += better.sample(&mut rng);
                    }
                    u64::from(y <= x)
                })
                .sum::<u64>();
            let (p_hat, stderr) = binomial(flips, replications);
            FlipCell {
                n,
                flips,
                replications,
                p_hat,
                stderr,
                log_rate: p_hat.ln() / n as f64,
            }
        })
        .collect();
    let grid: Vec<(f64, f64)> = cells.iter().map(|c| (c.n as f64, c.p_hat)).collect();
    let n_max = *n_grid.iter().max().unwrap() as f64;
    let mut report = FlipReport {
        master_seed,
        cells,
        pair_rate: phi,
        fit: None,
        status: String::new(),
        detail: None,
        tolerance: None,
        consistent: None,
    };
    if grid.iter().all(|c| c.1 == 0.0) {
        report.status = "DEGENERATE_ZERO_ERROR".into();
        return Ok(report);
    }
    match slope_fit(&grid) {
        Ok(fit) => {
            let tol = fit.half_width + 2.0 / n_max;
            let ok = fit.slope <= -phi + tol;
            report.status = if ok { "CONSISTENT" } else { "VIOLATED" }.into();
            report.tolerance = Some(tol);
            report.consistent = Some(ok);
            report.fit = Some(fit);
        }
        Err(e @ Error::InsufficientData { .. }) => {
            report.status = "INSUFFICIENT_DATA".into();
            report.detail = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Where a configuration takes its problem from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemSource {
    Path(PathBuf),
    Inline(ProblemSpec),
}

fn default_bounds() -> bool {
    true
}

/// Simulation configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSource,
    pub strategy: StrategyKind,
    pub budgets: Vec<u64>,
    pub replications: u64,
    pub seed: u64,
    #[serde(default = "default_bounds")]
    pub bounds: bool,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            Error::config(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a configuration; a problem given as a relative path is resolved
    /// against the configuration's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json_str(&text).map_err(|e| match e {
            Error::Config { location, message } => Error::Config {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        })?;
        if let ProblemSource::Path(p) = &mut cfg.problem {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budgets.is_empty() {
            return Err(Error::config("budgets", "the budget grid is empty"));
        }
        if let Some(w) = self.budgets.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::config(
                "budgets",
                format!("budgets must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        if self.replications == 0 {
            return Err(Error::config("replications", "must be at least 1"));
        }
        Ok(())
    }

    pub fn load_problem(&self) -> Result<BanditProblem> {
        match &self.problem {
            ProblemSource::Inline(spec) => spec.build(),
            ProblemSource::Path(p) => ProblemSpec::from_path(p)?.build(),
        }
        .map_err(|e| match e {
            Error::Config { location, message } => Error::Config {
                location: format!("problem: {location}"),
                message,
            },
            other => other,
        })
    }
}

/// Comparison of the fitted slope with one bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub bound: String,
    #[serde(with = "crate::rate_json")]
    pub bound_value: f64,
    pub slope: f64,
    pub tolerance: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub problem_digest: String,
    pub model: String,
    pub generic: bool,
    pub strategy: StrategyKind,
    pub master_seed: u64,
    pub replications: u64,
    pub budgets: Vec<u64>,
    pub cells: Vec<MisidEstimate>,
    pub fit: Option<SlopeFit>,
    pub cells_dropped: usize,
    /// `OK`, `DEGENERATE_ZERO_ERROR` or `INSUFFICIENT_DATA`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub verdicts: Vec<Verdict>,
    pub bounds: Option<BoundReport>,
    pub frequencies: Option<FrequencyReport>,
    /// `ln(1/R) / T_max`: slopes steeper than this are not resolvable.
    pub resolution_limit: f64,
    pub notes: Vec<String>,
}

impl SimReport {
    /// Zeroes the wall-clock fields, leaving a report that depends only on
    /// the configuration and seed.
    pub fn strip_timing(&mut self) {
        for c in &mut self.cells {
            c.wall_clock_ms = 0.0;
        }
    }

    /// Writes the `T, p_hat, stderr, R` table.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record(["T", "p_hat", "stderr", "R"]).map_err(io)?;
        for c in &self.cells {
            out.write_record([
                c.budget.to_string(),
                c.p_hat.to_string(),
                c.stderr.to_string(),
                c.replications.to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

const FREQUENCY_REPLICATIONS: u64 = 1000;

fn verdicts_for(kind: StrategyKind, bounds: &BoundReport, fit: &SlopeFit, tol: f64) -> Vec<Verdict> {
    let mut out = Vec::new();
    let mut push = |name: &str, b: &Option<BoundValue>, upper: bool| {
        if let Some(b) = b {
            let label = match (upper, fit.slope <= b.value + tol, fit.slope >= b.value - tol) {
                (true, true, _) => "UB_CONSISTENT",
                (true, false, _) => "UB_VIOLATED",
                (false, _, true) => "LB_CONSISTENT",
                (false, _, false) => "LB_VIOLATED",
            };
            out.push(Verdict {
                bound: name.to_string(),
                bound_value: b.value,
                slope: fit.slope,
                tolerance: tol,
                label: label.to_string(),
            });
        }
    };
    if kind == StrategyKind::SuccessiveRejects {
        push("cor3_phi", &bounds.upper.cor3_phi, true);
        push("cor3_gap", &bounds.upper.cor3_gap, true);
    }
    push("thm7", &bounds.lower.thm7, false);
    push("thm12", &bounds.lower.thm12, false);
    push("thm13", &bounds.lower.thm13, false);
    push("gap_lb_abm10", &bounds.lower.gap_lb_abm10, false);
    push("two_arm", &bounds.lower.two_arm, false);
    out
}

/// Runs a full experiment. `workers` caps the number of threads.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<SimReport> {
    config.validate()?;
    let problem = config.load_problem()?;
    match workers {
        Some(0) => Err(Error::invalid("workers must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?
            .install(|| experiment(config, &problem)),
        None => experiment(config, &problem),
    }
}

fn experiment(config: &ExperimentConfig, problem: &BanditProblem) -> Result<SimReport> {
    let kind = config.strategy;
    let min = kind.min_budget(problem.k())?;
    if let Some(&t) = config.budgets.iter().find(|&&t| t < min) {
        return Err(Error::config(
            "budgets",
            format!("budget {t} is below the minimum {min} for {} with K = {}", kind.name(), problem.k()),
        ));
    }
    let cells = config
        .budgets
        .iter()
        .map(|&t| estimate_misid_prob(problem, kind, t, config.replications, config.seed))
        .collect::<Result<Vec<_>>>()?;
    let t_max = *config.budgets.last().unwrap();
    let mut notes = Vec::new();
    if !problem.is_generic() {
        notes.push("problem is not generic: the best arm is fixed by the lowest-index tie-break".into());
    }
    if kind == StrategyKind::SequentialHalving {
        notes.push("sequential halving is experimental: no upper-bound verdicts are issued".into());
    }
    let bounds = config.bounds.then(|| compute_bounds(problem, Some(t_max)));
    let frequencies = if problem.is_generic() {
        Some(empirical_frequency_checks(
            problem,
            kind,
            t_max,
            config.replications.min(FREQUENCY_REPLICATIONS),
            config.seed,
        )?)
    } else {
        None
    };
    let grid: Vec<(f64, f64)> = cells.iter().map(|c| (c.budget as f64, c.p_hat)).collect();
    let positive = grid.iter().filter(|c| c.1 > 0.0).count();
    let mut report = SimReport {
        problem_digest: problem.digest(),
        model: problem.model_name().to_string(),
        generic: problem.is_generic(),
        strategy: kind,
        master_seed: config.seed,
        replications: config.replications,
        budgets: config.budgets.clone(),
        cells,
        fit: None,
        cells_dropped: grid.len() - positive,
        status: "OK".into(),
        detail: None,
        verdicts: Vec::new(),
        bounds,
        frequencies,
        resolution_limit: -(config.replications as f64).ln() / t_max as f64,
        notes,
    };
    if positive == 0 {
        report.status = "DEGENERATE_ZERO_ERROR".into();
        return Ok(report);
    }
    match slope_fit(&grid) {
        Ok(fit) => {
            let tol = fit.half_width + 2.0 / t_max as f64;
            if let Some(b) = &report.bounds {
                report.verdicts = verdicts_for(kind, b, &fit, tol);
            }
            report.fit = Some(fit);
        }
        Err(e @ Error::InsufficientData { .. }) => {
            report.status = "INSUFFICIENT_DATA".into();
            report.detail = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}
