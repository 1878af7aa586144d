//! Seeded property suite over all modules.
//!
//! Each property draws its cases from its own stream derived from the suite
//! seed, so results are reproducible and independent of property order.

use rand::Rng;
use serde::Serialize;

use crate::bounds::{lb_gap_abm10, lb_thm12, lb_thm13, lb_thm7, model_c_d, ub_cor3, RateFloor};
use crate::dist::{kl_divergence, Distribution, Family};
use crate::error::Result;
use crate::info::{
    chernoff_d, fenchel_dual, fenchel_dual_numeric, linf, pair_rate, tilt, tilted_mean, Side,
};
use crate::problem::{analyze_problem, BanditProblem};
use crate::schedule::sr_schedule;
use crate::sim::{estimate_misid_prob, flip_prob_experiment, run_experiment, ExperimentConfig};
use crate::stream::{child_rng, Stream};
use crate::strategy::{run_strategy, run_with_rewards, RewardTable, StrategyKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub cases: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

/// Counts cases and remembers the first failure.
struct Cases {
    total: u64,
    failure: Option<String>,
}

impl Cases {
    fn new() -> Self {
        Cases {
            total: 0,
            failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn finish(self, module: &'static str, name: &'static str) -> PropertyResult {
        PropertyResult {
            module,
            name,
            passed: self.failure.is_none(),
            cases: self.total,
            detail: self.failure.unwrap_or_else(|| "ok".into()),
        }
    }
}

/// A random finite-support distribution with `2..=max_atoms` distinct atoms
/// on the grid `{0, 0.001, …, 1}`.
pub fn random_finite(rng: &mut impl Rng, max_atoms: usize) -> Distribution {
    loop {
        let n = rng.random_range(2..=max_atoms.max(2));
        let mut atoms: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 1000.0).round() / 1000.0).collect();
        atoms.sort_by(f64::total_cmp);
        atoms.dedup();
        if atoms.len() >= 2 {
            return random_weights_on(rng, &atoms);
        }
    }
}

/// Random positive weights on the given atoms.
pub fn random_weights_on(rng: &mut impl Rng, atoms: &[f64]) -> Distribution {
    let raw: Vec<f64> = atoms.iter().map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    Distribution::finite(atoms, &weights).expect("normalized weights")
}

// λ with E(tilt(ν, λ)) = y, by bisection on the increasing tilted mean
fn tilt_for_mean(d: &Distribution, y: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while tilted_mean(d, lo) > y {
        lo *= 2.0;
    }
    while tilted_mean(d, hi) < y {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tilted_mean(d, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn tilt_oracle(d: &Distribution, y: f64) -> f64 {
    let t = tilt(d, tilt_for_mean(d, y)).expect("finite support");
    kl_divergence(&t, d).expect("same model")
}

fn normal_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

fn bern_problem(ps: &[f64]) -> BanditProblem {
    analyze_problem(ps.iter().map(|&p| Distribution::bernoulli(p).unwrap()).collect()).unwrap()
}

fn random_generic_problem(rng: &mut Stream, k: usize) -> BanditProblem {
    loop {
        let arms: Vec<Distribution> = match rng.random_range(0..3) {
            0 => (0..k)
                .map(|_| Distribution::bernoulli(rng.random_range(0.05..0.95)).unwrap())
                .collect(),
            1 => (0..k)
                .map(|_| Distribution::gaussian(rng.random_range(-2.0..2.0), 1.0).unwrap())
                .collect(),
            _ => (0..k).map(|_| random_finite(rng, 6)).collect(),
        };
        let p = analyze_problem(arms).unwrap();
        if p.is_generic() {
            return p;
        }
    }
}

type Property = fn(&mut Stream) -> Result<Cases>;

const PROPERTIES: &[(&str, &str, Property)] = &[
    ("dist_model", "kl_nonnegative_zero_iff_equal", kl_nonnegative),
    ("dist_model", "kl_joint_convexity", kl_joint_convexity),
    ("dist_model", "gaussian_translation_invariance", gaussian_translation),
    ("dist_model", "sample_mean_concentration", sample_mean),
    ("info_geometry", "duality_tilt_oracle", duality),
    ("info_geometry", "exp_family_closed_form", exp_family_closed_form),
    ("info_geometry", "pair_rate_monotone", pair_rate_monotone),
    ("info_geometry", "chernoff_sandwich", sandwich),
    ("info_geometry", "gap_dominance", gap_dominance),
    ("info_geometry", "normality_window", normality),
    ("info_geometry", "rate_function_shape", rate_function_shape),
    ("strategies", "sr_pull_counts", sr_pull_counts),
    ("strategies", "schedule_gamma_limits", gamma_limits),
    ("strategies", "trace_determinism", trace_determinism),
    ("strategies", "sr_uniform_coupling", sr_uniform_coupling),
    ("bound_evaluators", "thm12_relaxes_thm7", thm12_ge_thm7),
    ("bound_evaluators", "phi_bound_tighter_than_gap", phi_vs_gap),
    ("bound_evaluators", "thm7_dominates_gap_bound", thm7_vs_abm10),
    ("bound_evaluators", "exp_ordering_matches_means", exp_ordering),
    ("bound_evaluators", "two_arm_equals_chernoff", two_arm_chernoff),
    ("sim_harness", "reproducible_across_workers", reproducible),
    ("sim_harness", "monotone_difficulty", monotone_difficulty),
    ("sim_harness", "flip_gaussian_tail", flip_tail),
];

/// Runs every property with cases drawn from `seed`.
pub fn verify(seed: u64) -> VerifyReport {
    let properties = PROPERTIES
        .iter()
        .enumerate()
        .map(|(i, &(module, name, prop))| {
            let mut rng = child_rng(seed, u64::MAX - i as u64, 0);
            match prop(&mut rng) {
                Ok(cases) => cases.finish(module, name),
                Err(e) => PropertyResult {
                    module,
                    name,
                    passed: false,
                    cases: 0,
                    detail: format!("error: {e}"),
                },
            }
        })
        .collect();
    VerifyReport { seed, properties }
}

fn kl_nonnegative(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..200 {
        let p = random_finite(rng, 8);
        let atoms = p.as_finite().unwrap().atoms().to_vec();
        let q = random_weights_on(rng, &atoms);
        let v = kl_divergence(&p, &q)?;
        c.check(v >= 0.0, || format!("KL = {v} < 0"));
        c.check(kl_divergence(&p, &p)? == 0.0, || "KL(p, p) != 0".into());
        c.check(p == q || v > 0.0, || "KL = 0 for distinct distributions".into());
    }
    for _ in 0..100 {
        let (a, b) = (rng.random_range(0.01..0.99), rng.random_range(0.01..0.99));
        let v = kl_divergence(&Distribution::bernoulli(a)?, &Distribution::bernoulli(b)?)?;
        c.check(v >= 0.0 && (v == 0.0) == (a == b), || format!("kl({a}, {b}) = {v}"));
    }
    Ok(c)
}

fn kl_joint_convexity(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..200 {
        let grid = random_finite(rng, 8).as_finite().unwrap().atoms().to_vec();
        let d: Vec<Distribution> = (0..4).map(|_| random_weights_on(rng, &grid)).collect();
        let w = |x: &Distribution| x.as_finite().unwrap().weights().to_vec();
        for lam in [0.25, 0.5, 0.75] {
            let mix = |a: &Distribution, b: &Distribution| {
                let ws: Vec<f64> = w(a).iter().zip(w(b)).map(|(x, y)| lam * x + (1.0 - lam) * y).collect();
                let s: f64 = ws.iter().sum();
                Distribution::finite(&grid, &ws.iter().map(|x| x / s).collect::<Vec<_>>())
            };
            let lhs = kl_divergence(&mix(&d[0], &d[1])?, &mix(&d[2], &d[3])?)?;
            let rhs = lam * kl_divergence(&d[0], &d[2])? + (1.0 - lam) * kl_divergence(&d[1], &d[3])?;
            c.check(lhs <= rhs + 1e-12, || format!("convexity: {lhs} > {rhs} at λ = {lam}"));
        }
    }
    Ok(c)
}

fn gaussian_translation(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..200 {
        let s2 = rng.random_range(0.1..4.0);
        let (m1, m2, sh) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-10.0..10.0));
        let g = |m: f64| Distribution::gaussian(m, s2);
        let a = kl_divergence(&g(m1)?, &g(m2)?)?;
        let b = kl_divergence(&g(m1 + sh)?, &g(m2 + sh)?)?;
        c.check((a - b).abs() <= 1e-9 * a.max(1.0), || format!("shift {sh}: {a} vs {b}"));
    }
    Ok(c)
}

fn sample_mean(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    let n = 100_000;
    let fin = random_finite(rng, 8);
    let cases = [
        (Distribution::bernoulli(0.3)?, 0.21f64.sqrt()),
        (Distribution::gaussian(2.0, 4.0)?, 2.0),
        (Distribution::poisson(3.0)?, 3f64.sqrt()),
        (fin.clone(), {
            let f = fin.as_finite().unwrap();
            let m = f.mean();
            f.atoms().iter().zip(f.weights()).map(|(x, w)| w * (x - m).powi(2)).sum::<f64>().sqrt()
        }),
    ];
    for (d, sd) in cases {
        let xs = d.sample_batch(n, rng);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let tol = 5.0 * sd / (n as f64).sqrt();
        c.check((mean - d.mean()).abs() <= tol.max(1e-12), || {
            format!("{}: sample mean {mean} vs {}", d.model_name(), d.mean())
        });
    }
    Ok(c)
}

fn duality(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    let mut made = 0;
    while made < 200 {
        let d = random_finite(rng, 8);
        let s = d.support();
        if s.lower == s.upper {
            continue;
        }
        made += 1;
        for _ in 0..5 {
            let x = s.lower + (0.05 + 0.95 * rng.random::<f64>()) * (s.mean - s.lower);
            let v = fenchel_dual(&d, x).value;
            let o = tilt_oracle(&d, x);
            c.check((v - o).abs() <= 1e-5, || format!("{:?} x = {x}: dual {v} vs oracle {o}", d.as_finite().unwrap().atoms()));
        }
    }
    Ok(c)
}

fn exp_family_closed_form(_rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    let grid = |lo: f64, hi: f64| (0..50).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / 50.0);
    let mut families = vec![(Family::Bernoulli, 0.0, 1.0), (Family::Poisson, 0.05, 8.0)];
    for s2 in [0.25, 1.0, 4.0] {
        families.push((Family::Gaussian { sigma2: s2 }, -3.0, 3.0));
    }
    for (fam, lo, hi) in families {
        for mu in grid(lo, hi) {
            let d = Distribution::exp_family(fam, mu)?;
            for x in grid(lo, hi) {
                let v = fenchel_dual_numeric(&d, x).value;
                let exact = fam.divergence(x, mu);
                c.check((v - exact).abs() <= 1e-9, || {
                    format!("{} μ = {mu}, x = {x}: {v} vs {exact}", fam.name())
                });
            }
        }
    }
    Ok(c)
}

fn random_exp_pair(rng: &mut Stream) -> Result<(Distribution, Distribution)> {
    let (fam, lo, hi) = match rng.random_range(0..3) {
        0 => (Family::Bernoulli, 0.02, 0.98),
        1 => (Family::Gaussian { sigma2: rng.random_range(0.2..3.0) }, -3.0, 3.0),
        _ => (Family::Poisson, 0.1, 10.0),
    };
    let mut a = rng.random_range(lo..hi);
    let mut b = rng.random_range(lo..hi);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if a == b {
        b = a + 1e-3;
    }
    Ok((Distribution::exp_family(fam, a)?, Distribution::exp_family(fam, b)?))
}

fn pair_rate_monotone(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..200 {
        let (w, b) = random_exp_pair(rng)?;
        let fam = w.as_exp().unwrap().family();
        let mu1 = w.mean();
        let mu2 = mu1 - rng.random::<f64>() * (mu1 - fam.mean_closure().0).min(2.0) * 0.99;
        let w2 = Distribution::exp_family(fam, mu2)?;
        let (r1, r2) = (pair_rate(&w, &b)?.value, pair_rate(&w2, &b)?.value);
        c.check(r2 >= r1 - 1e-10, || format!("{}: L({mu2}) = {r2} < L({mu1}) = {r1}", fam.name()));
    }
    Ok(c)
}

fn sandwich(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..500 {
        let (w, b) = random_exp_pair(rng)?;
        let l = pair_rate(&w, &b)?.value;
        let d = chernoff_d(&w, &b)?.value;
        c.check(d <= l + 1e-10 && l <= 2.0 * d + 1e-10, || {
            format!("{} {} vs {}: D = {d}, L = {l}", w.model_name(), w.mean(), b.mean())
        });
    }
    Ok(c)
}

fn gap_dominance(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for i in 0..500 {
        let (w, b) = if i % 2 == 0 {
            (random_finite(rng, 8), random_finite(rng, 8))
        } else {
            (
                Distribution::bernoulli(rng.random_range(0.01..0.99))?,
                Distribution::bernoulli(rng.random_range(0.01..0.99))?,
            )
        };
        let (w, b) = if w.mean() < b.mean() { (w, b) } else { (b, w) };
        if w.mean() == b.mean() {
            continue;
        }
        let gap = b.mean() - w.mean();
        let l = pair_rate(&w, &b)?.value;
        c.check(l >= gap * gap - 1e-10, || format!("L = {l} < Δ² = {}", gap * gap));
        let below = linf(&b, w.mean(), Side::Below, false).value;
        c.check(below >= 2.0 * gap * gap - 1e-10, || format!("L_inf = {below} < 2Δ²"));
        let above = linf(&w, b.mean(), Side::Above, false).value;
        c.check(above >= 2.0 * gap * gap - 1e-10, || format!("L_inf = {above} < 2Δ²"));
    }
    Ok(c)
}

fn normality(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for i in 0..60 {
        let d = match i % 3 {
            0 => random_finite(rng, 6),
            1 => Distribution::bernoulli(rng.random_range(0.05..0.95))?,
            _ => Distribution::gaussian(rng.random_range(-1.0..1.0), 1.0)?,
        };
        let s = d.support();
        if s.upper == s.mean {
            continue;
        }
        let span = if s.upper.is_finite() { s.upper - s.mean } else { 2.0 };
        let x = s.mean + 0.9 * rng.random::<f64>() * span;
        let full = linf(&d, x, Side::Above, true).value;
        for eps in [0.1, 0.01] {
            // infimum over means in (x, x + ε), approached along the tilted family
            let window = (1..=40)
                .map(|j| x + eps * 0.5f64.powi(j))
                .filter(|&y| y < s.upper)
                .map(|y| match d {
                    Distribution::Finite(_) => tilt_oracle(&d, y),
                    Distribution::Exp(e) => e.family().divergence(y, e.mean()),
                })
                .fold(f64::INFINITY, f64::min);
            c.check((window - full).abs() <= 1e-6, || {
                format!("{} x = {x}, ε = {eps}: window {window} vs {full}", d.model_name())
            });
        }
    }
    Ok(c)
}

fn rate_function_shape(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..100 {
        let d = random_finite(rng, 8);
        let s = d.support();
        c.check(fenchel_dual(&d, s.mean).value == 0.0, || "φ*(E) != 0".into());
        let xs: Vec<f64> = (0..=20).map(|i| s.lower + (s.upper - s.lower) * i as f64 / 20.0).collect();
        for w in xs.windows(2) {
            let (a, b) = (fenchel_dual(&d, w[0]).value, fenchel_dual(&d, w[1]).value);
            if w[1] <= s.mean {
                c.check(a >= b - 1e-10, || format!("not non-increasing below the mean at {}", w[0]));
            } else if w[0] >= s.mean {
                c.check(b >= a - 1e-10, || format!("not non-decreasing above the mean at {}", w[0]));
            }
        }
    }
    Ok(c)
}

fn sr_pull_counts(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..100 {
        let k = rng.random_range(2..=8);
        let ps: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..0.9)).collect();
        let p = bern_problem(&ps);
        let t = StrategyKind::SuccessiveRejects.min_budget(k)? + rng.random_range(0..500);
        let s = sr_schedule(k, t)?;
        let tr = run_strategy(StrategyKind::SuccessiveRejects, &p, t, child_rng(rng.random(), t, 0))?;
        for (r, &a) in tr.rejection_order.iter().enumerate() {
            c.check(tr.pulls[a] == s.cumulative[r], || format!("K = {k}, T = {t}: phase {}", r + 1));
        }
        c.check(tr.pulls[tr.recommendation] == *s.cumulative.last().unwrap(), || "survivor".into());
        c.check(tr.rewards_consumed <= t, || "budget exceeded".into());
    }
    Ok(c)
}

fn gamma_limits(_rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for k in 2..=10 {
        for t in [1_000u64, 10_000, 100_000] {
            let s = sr_schedule(k, t)?;
            for (n, g) in s.cumulative.iter().zip(&s.gamma) {
                let dev = (*n as f64 / t as f64 - g).abs();
                c.check(dev <= k as f64 / t as f64, || format!("K = {k}, T = {t}: deviation {dev}"));
            }
        }
    }
    Ok(c)
}

fn trace_determinism(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for kind in [StrategyKind::SuccessiveRejects, StrategyKind::Uniform, StrategyKind::SequentialHalving] {
        for _ in 0..20 {
            let k = rng.random_range(2..=6);
            let p = random_generic_problem(rng, k);
            let t = kind.min_budget(p.k())? + 100;
            let seed = rng.random();
            let a = run_strategy(kind, &p, t, child_rng(seed, t, 0))?;
            let b = run_strategy(kind, &p, t, child_rng(seed, t, 0))?;
            c.check(a == b, || format!("{} traces differ", kind.name()));
        }
    }
    Ok(c)
}

fn sr_uniform_coupling(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..200 {
        let p = analyze_problem(vec![
            Distribution::gaussian(rng.random_range(-1.0..1.0), 1.0)?,
            Distribution::gaussian(rng.random_range(-1.0..1.0), 1.0)?,
        ])?;
        let n = rng.random_range(1..60);
        let table = RewardTable::sample(&p, n, rng);
        let sr = run_with_rewards(StrategyKind::SuccessiveRejects, 2, 2 * n as u64, &mut table.clone())?;
        let un = run_with_rewards(StrategyKind::Uniform, 2, 2 * n as u64, &mut table.clone())?;
        c.check(sr.recommendation == un.recommendation && sr.pulls == un.pulls, || {
            format!("n = {n}: SR {} vs uniform {}", sr.recommendation, un.recommendation)
        });
    }
    Ok(c)
}

fn thm12_ge_thm7(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..100 {
        let k = rng.random_range(2..=5);
        let p = random_generic_problem(rng, k);
        let (a, b) = (lb_thm12(&p)?.value, lb_thm7(&p)?.value);
        c.check(a >= b - 1e-10, || format!("{}: thm12 {a} < thm7 {b}", p.model_name()));
    }
    Ok(c)
}

fn phi_vs_gap(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for i in 0..100 {
        let k = rng.random_range(2..=6);
        let arms: Vec<Distribution> = if i % 2 == 0 {
            (0..k).map(|_| random_finite(rng, 6)).collect()
        } else {
            (0..k).map(|_| Distribution::bernoulli(rng.random_range(0.02..0.98)).unwrap()).collect()
        };
        let p = analyze_problem(arms)?;
        if !p.has_unique_best() {
            continue;
        }
        let phi = ub_cor3(&p, RateFloor::Phi)?.bound.value;
        let gap = ub_cor3(&p, RateFloor::GapSquared)?.bound.value;
        c.check(phi <= gap + 1e-10, || format!("Φ bound {phi} > gap bound {gap}"));
    }
    Ok(c)
}

fn thm7_vs_abm10(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for i in 0..100 {
        let k = rng.random_range(2..=6);
        let p = loop {
            let arms: Vec<Distribution> = (0..k)
                .map(|_| {
                    if i % 2 == 0 {
                        Distribution::bernoulli(rng.random_range(0.25..=0.75)).unwrap()
                    } else {
                        Distribution::gaussian(rng.random_range(-2.0..2.0), 0.5).unwrap()
                    }
                })
                .collect();
            let p = analyze_problem(arms)?;
            if p.is_generic() {
                break p;
            }
        };
        let c_d = if i % 2 == 0 { 1.0 / (2.0 * 0.25 * 0.75) } else { model_c_d(&p).unwrap() };
        let (a, b) = (lb_thm7(&p)?.value, lb_gap_abm10(&p, c_d)?.value);
        c.check(a >= b - 1e-12, || format!("thm7 {a} < gap bound {b}"));
    }
    Ok(c)
}

fn exp_ordering(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..100 {
        let k = rng.random_range(2..=7);
        let fam = match rng.random_range(0..3) {
            0 => Family::Bernoulli,
            1 => Family::Gaussian { sigma2: 1.5 },
            _ => Family::Poisson,
        };
        let arms = (0..k)
            .map(|_| Distribution::exp_family(fam, rng.random_range(0.05..0.95)))
            .collect::<Result<Vec<_>>>()?;
        let p = analyze_problem(arms)?;
        if !p.is_generic() {
            continue;
        }
        let by_phi: Vec<usize> = ub_cor3(&p, RateFloor::Phi)?.ordering.iter().map(|o| o.arm).collect();
        c.check(by_phi == p.order(), || format!("{}: {by_phi:?} vs {:?}", fam.name(), p.order()));
    }
    Ok(c)
}

fn two_arm_chernoff(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    for _ in 0..100 {
        let (w, b) = random_exp_pair(rng)?;
        let d = chernoff_d(&w, &b)?.value;
        let p = analyze_problem(vec![b, w])?;
        let t13 = lb_thm13(&p)?.value;
        let two = crate::bounds::two_arm(&p)?.value;
        c.check((t13 + d).abs() <= 1e-8 && (two - t13).abs() <= 1e-8, || {
            format!("thm13 {t13}, two-arm {two}, D {d}")
        });
    }
    Ok(c)
}

fn reproducible(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    let seed: u32 = rng.random();
    let cfg = ExperimentConfig::from_json_str(&format!(
        r#"{{"problem": {{"model": "bernoulli", "arms": [0.6, 0.5, 0.3]}},
            "strategy": "sr", "budgets": [16, 32, 48], "replications": 2000, "seed": {seed}}}"#
    ))?;
    let mut a = run_experiment(&cfg, Some(1))?;
    let mut b = run_experiment(&cfg, Some(3))?;
    a.strip_timing();
    b.strip_timing();
    let (ja, jb) = (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    c.check(ja == jb, || "reports differ between 1 and 3 workers".into());
    Ok(c)
}

fn monotone_difficulty(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    let p = bern_problem(&[0.6, 0.5, 0.4]);
    let seed = rng.random();
    let cells = [12u64, 24, 48, 96, 192]
        .iter()
        .map(|&t| estimate_misid_prob(&p, StrategyKind::SuccessiveRejects, t, 4000, seed))
        .collect::<Result<Vec<_>>>()?;
    for w in cells.windows(2) {
        let slack = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        c.check(w[1].p_hat <= w[0].p_hat + slack, || {
            format!("p̂ rose from {} at T = {} to {} at T = {}", w[0].p_hat, w[0].budget, w[1].p_hat, w[1].budget)
        });
    }
    Ok(c)
}

fn flip_tail(rng: &mut Stream) -> Result<Cases> {
    let mut c = Cases::new();
    let g0 = Distribution::gaussian(0.0, 1.0)?;
    let g1 = Distribution::gaussian(1.0, 1.0)?;
    let r = flip_prob_experiment(&g0, &g1, &[2, 4, 8, 16], 50_000, rng.random())?;
    for cell in &r.cells {
        let exact = normal_tail((cell.n as f64 / 2.0).sqrt());
        c.check((cell.p_hat - exact).abs() <= 3.0 * cell.stderr + 1e-4, || {
            format!("N = {}: p̂ = {} vs {exact}", cell.n, cell.p_hat)
        });
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let a = verify(7);
        for p in &a.properties {
            assert!(p.passed, "{}::{} failed: {}", p.module, p.name, p.detail);
            assert!(p.cases > 0, "{}::{} ran no cases", p.module, p.name);
        }
        assert_eq!(a, verify(7));
    }
}
