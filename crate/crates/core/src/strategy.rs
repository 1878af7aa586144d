//! Fixed-budget strategies: successive rejects (SR), uniform exploration and
//! sequential halving (SH).
//!
//! Rewards come from a [`RewardSource`]; [`SampledRewards`] draws them lazily
//! from the arms, [`RewardTable`] replays pre-drawn per-arm sequences.
//!
//! Sequential halving is experimental: it runs `⌈log₂ K⌉` rounds, each with
//! budget `⌊T / ⌈log₂ K⌉⌋` split evenly over the surviving arms, and keeps the
//! better half (rounded up) by within-round empirical mean.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::BanditProblem;
use crate::schedule::sr_schedule;
use crate::stream::child_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "sr")]
    SuccessiveRejects,
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "sh")]
    SequentialHalving,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::SuccessiveRejects => "sr",
            StrategyKind::Uniform => "uniform",
            StrategyKind::SequentialHalving => "sh",
        }
    }

    /// Smallest admissible budget for `k` arms.
    pub fn min_budget(&self, k: usize) -> Result<u64> {
        if k < 2 {
            return Err(Error::invalid(format!("a strategy needs K >= 2 arms, got {k}")));
        }
        Ok(match self {
            StrategyKind::SuccessiveRejects => crate::schedule::sr_min_budget(k)?,
            StrategyKind::Uniform => k as u64,
            StrategyKind::SequentialHalving => (k * halving_rounds(k)) as u64,
        })
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sr" => Ok(StrategyKind::SuccessiveRejects),
            "uniform" => Ok(StrategyKind::Uniform),
            "sh" => Ok(StrategyKind::SequentialHalving),
            other => Err(Error::invalid(format!(
                "unknown strategy {other:?} (expected sr, uniform or sh)"
            ))),
        }
    }
}

fn halving_rounds(k: usize) -> usize {
    (usize::BITS - (k - 1).leading_zeros()) as usize
}

/// Record of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyTrace {
    /// `N_a(T)` for every arm.
    pub pulls: Vec<u64>,
    /// Arms in the order they were eliminated (empty for uniform).
    pub rejection_order: Vec<usize>,
    /// `I_T`.
    pub recommendation: usize,
    pub rewards_consumed: u64,
}

/// Supplies the next reward of an arm.
pub trait RewardSource {
    fn pull(&mut self, arm: usize) -> f64;
}

/// Draws each reward from the arm's distribution when it is pulled.
pub struct SampledRewards<'a, R: Rng> {
    problem: &'a BanditProblem,
    rng: R,
}

impl<'a, R: Rng> SampledRewards<'a, R> {
    pub fn new(problem: &'a BanditProblem, rng: R) -> Self {
        SampledRewards { problem, rng }
    }
}

impl<R: Rng> RewardSource for SampledRewards<'_, R> {
    fn pull(&mut self, arm: usize) -> f64 {
        self.problem.arm(arm).sample(&mut self.rng)
    }
}

/// Replays fixed per-arm reward sequences: the `n`-th pull of arm `a`
/// returns `table[a][n]`.
#[derive(Debug, Clone)]
pub struct RewardTable {
    table: Vec<Vec<f64>>,
    next: Vec<usize>,
}

impl RewardTable {
    pub fn new(table: Vec<Vec<f64>>) -> Self {
        let next = vec![0; table.len()];
        RewardTable { table, next }
    }

    /// Draws `n` rewards per arm.
    pub fn sample<R: Rng>(problem: &BanditProblem, n: usize, rng: &mut R) -> Self {
        Self::new(problem.arms().iter().map(|d| d.sample_batch(n, rng)).collect())
    }
}

impl RewardSource for RewardTable {
    /// Panics when an arm's sequence is exhausted.
    fn pull(&mut self, arm: usize) -> f64 {
        let i = self.next[arm];
        self.next[arm] += 1;
        self.table[arm][i]
    }
}

struct Tally {
    pulls: Vec<u64>,
    sums: Vec<f64>,
}

impl Tally {
    fn new(k: usize) -> Self {
        Tally {
            pulls: vec![0; k],
            sums: vec![0.0; k],
        }
    }

    fn pull(&mut self, source: &mut impl RewardSource, arm: usize) {
        self.sums[arm] += source.pull(arm);
        self.pulls[arm] += 1;
    }

    fn consumed(&self) -> u64 {
        self.pulls.iter().sum()
    }
}

/// Runs `kind` on `problem` with budget `t`, drawing rewards from `rng`.
pub fn run_strategy<R: Rng>(
    kind: StrategyKind,
    problem: &BanditProblem,
    t: u64,
    rng: R,
) -> Result<StrategyTrace> {
    run_with_rewards(kind, problem.k(), t, &mut SampledRewards::new(problem, rng))
}

/// Runs `kind` on `k` arms whose rewards come from `source`.
pub fn run_with_rewards(
    kind: StrategyKind,
    k: usize,
    t: u64,
    source: &mut impl RewardSource,
) -> Result<StrategyTrace> {
    let min = kind.min_budget(k)?;
    if t < min {
        return Err(Error::invalid(format!(
            "budget T = {t} is too small for {} with K = {k}; minimum is {min}",
            kind.name()
        )));
    }
    Ok(match kind {
        StrategyKind::SuccessiveRejects => successive_rejects(k, t, source)?,
        StrategyKind::Uniform => uniform(k, t, source),
        StrategyKind::SequentialHalving => sequential_halving(k, t, source),
    })
}

fn successive_rejects(k: usize, t: u64, source: &mut impl RewardSource) -> Result<StrategyTrace> {
    let schedule = sr_schedule(k, t)?;
    let mut tally = Tally::new(k);
    let mut alive: Vec<usize> = (0..k).collect();
    let mut rejected = Vec::with_capacity(k - 1);
    for &n in &schedule.per_arm_pulls {
        for _ in 0..n {
            for &a in &alive {
                tally.pull(source, a);
            }
        }
        // survivors share the same count, so sums order like averages
        let pos = alive
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| tally.sums[a].total_cmp(&tally.sums[b]).then(a.cmp(&b)))
            .map(|(i, _)| i)
            .unwrap();
        rejected.push(alive.remove(pos));
    }
    Ok(StrategyTrace {
        rewards_consumed: tally.consumed(),
        pulls: tally.pulls,
        rejection_order: rejected,
        recommendation: alive[0],
    })
}

fn uniform(k: usize, t: u64, source: &mut impl RewardSource) -> StrategyTrace {
    let mut tally = Tally::new(k);
    for _ in 0..t / k as u64 {
        for a in 0..k {
            tally.pull(source, a);
        }
    }
    let best = (0..k)
        .max_by(|&a, &b| tally.sums[a].total_cmp(&tally.sums[b]).then(b.cmp(&a)))
        .unwrap();
    StrategyTrace {
        rewards_consumed: tally.consumed(),
        pulls: tally.pulls,
        rejection_order: Vec::new(),
        recommendation: best,
    }
}

fn sequential_halving(k: usize, t: u64, source: &mut impl RewardSource) -> StrategyTrace {
    let rounds = halving_rounds(k);
    let round_budget = t / rounds as u64;
    let mut tally = Tally::new(k);
    let mut alive: Vec<usize> = (0..k).collect();
    let mut rejected = Vec::with_capacity(k - 1);
    for _ in 0..rounds {
        let n = round_budget / alive.len() as u64;
        let mut round_sums = vec![0.0; k];
        for _ in 0..n {
            for &a in &alive {
                let before = tally.sums[a];
                tally.pull(source, a);
                round_sums[a] += tally.sums[a] - before;
            }
        }
        // equal within-round counts: sums order like means
        alive.sort_by(|&a, &b| round_sums[b].total_cmp(&round_sums[a]).then(a.cmp(&b)));
        let keep = alive.len().div_ceil(2);
        rejected.extend(alive.drain(keep..).rev());
        alive.sort_unstable();
    }
    StrategyTrace {
        rewards_consumed: tally.consumed(),
        pulls: tally.pulls,
        rejection_order: rejected,
        recommendation: alive[0],
    }
}

/// One empirical frequency constraint `freq ≤ threshold + 3·stderr`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyCheck {
    /// Rank of the arm by decreasing mean (1 = best).
    pub rank: usize,
    pub arm: usize,
    /// Mean of `N_a(T) / T` over replications.
    pub frequency: f64,
    pub stderr: f64,
    pub threshold: f64,
    /// `threshold + 3·stderr − frequency`; nonnegative iff the check holds.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyReport {
    pub strategy: StrategyKind,
    pub budget: u64,
    pub replications: u64,
    /// Worst arm against `1/K`.
    pub balanced_worst: FrequencyCheck,
    /// Rank-`a` arm against `1/a`, for `a = 1..=K`.
    pub monotonous: Vec<FrequencyCheck>,
}

impl FrequencyReport {
    pub fn all_hold(&self) -> bool {
        self.balanced_worst.holds && self.monotonous.iter().all(|c| c.holds)
    }
}

const FREQ_SLACK: f64 = 1e-12;

/// Pull-frequency checks for being balanced against the worst arm and
/// monotonous, averaged over `replications` seeded runs.
pub fn empirical_frequency_checks(
    problem: &BanditProblem,
    kind: StrategyKind,
    t: u64,
    replications: u64,
    master_seed: u64,
) -> Result<FrequencyReport> {
    problem.require_generic("empirical frequency checks")?;
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    let k = problem.k();
    // integer aggregation keeps the result independent of scheduling
    let (sums, squares) = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let trace = run_strategy(kind, problem, t, child_rng(master_seed, t, rep))?;
            let squares: Vec<u128> = trace.pulls.iter().map(|&n| (n as u128) * (n as u128)).collect();
            Ok::<_, Error>((trace.pulls, squares))
        })
        .try_reduce(
            || (vec![0u64; k], vec![0u128; k]),
            |(mut s1, mut q1), (s2, q2)| {
                for a in 0..k {
                    s1[a] += s2[a];
                    q1[a] += q2[a];
                }
                Ok((s1, q1))
            },
        )?;
    let r = replications as f64;
    let tf = t as f64;
    let check = |rank: usize, threshold: f64| {
        let arm = problem.ranked(rank);
        let mean_pulls = sums[arm] as f64 / r;
        let frequency = mean_pulls / tf;
        let var = if replications > 1 {
            let sq = squares[arm] as f64 / r;
            ((sq - mean_pulls * mean_pulls) * r / (r - 1.0)).max(0.0) / (tf * tf)
        } else {
            0.0
        };
        let stderr = (var / r).sqrt();
        let margin = threshold + 3.0 * stderr - frequency;
        FrequencyCheck {
            rank,
            arm,
            frequency,
            stderr,
            threshold,
            margin,
            holds: margin >= -FREQ_SLACK,
        }
    };
    Ok(FrequencyReport {
        strategy: kind,
        budget: t,
        replications,
        balanced_worst: check(k, 1.0 / k as f64),
        monotonous: (1..=k).map(|a| check(a, 1.0 / a as f64)).collect(),
    })
}
