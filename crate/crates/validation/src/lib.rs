//! Reference computations used to check the `bai` library: closed-form
//! divergences, a bisection tilt oracle for finite distributions, exact
//! binomial error probabilities, and seeded generators. Everything here is
//! written directly from the definitions and shares no numerics with `bai`.

use bai::dist::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Atoms and weights of a finite distribution with 2..=max_atoms atoms on
/// a 0.001 grid in [0, 1] and weights bounded away from zero.
pub fn finite_parts(rng: &mut impl Rng, max_atoms: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let n = rng.random_range(2..=max_atoms);
        let mut atoms: Vec<f64> = (0..n).map(|_| rng.random_range(0..=1000) as f64 / 1000.0).collect();
        atoms.sort_by(f64::total_cmp);
        atoms.dedup();
        if atoms.len() < 2 {
            continue;
        }
        let raw: Vec<f64> = atoms.iter().map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        return (atoms, raw.iter().map(|w| w / s).collect());
    }
}

pub fn finite(atoms: &[f64], weights: &[f64]) -> Distribution {
    Distribution::finite(atoms, weights).unwrap()
}

pub fn mean_of(atoms: &[f64], weights: &[f64]) -> f64 {
    atoms.iter().zip(weights).map(|(a, w)| a * w).sum()
}

pub fn kl_bernoulli(x: f64, p: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(x, p) + term(1.0 - x, 1.0 - p)
}

pub fn kl_gaussian(x: f64, mu: f64, sigma2: f64) -> f64 {
    (x - mu).powi(2) / (2.0 * sigma2)
}

pub fn kl_poisson(x: f64, mu: f64) -> f64 {
    if x == 0.0 {
        mu
    } else {
        x * (x / mu).ln() - x + mu
    }
}

fn log_mgf(atoms: &[f64], weights: &[f64], l: f64) -> f64 {
    let top = atoms.iter().map(|a| l * a).fold(f64::NEG_INFINITY, f64::max);
    top + atoms
        .iter()
        .zip(weights)
        .map(|(a, w)| w * (l * a - top).exp())
        .sum::<f64>()
        .ln()
}

fn tilted_mean(atoms: &[f64], weights: &[f64], l: f64) -> f64 {
    let top = atoms.iter().map(|a| l * a).fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (a, w) in atoms.iter().zip(weights) {
        let e = w * (l * a - top).exp();
        num += a * e;
        den += e;
    }
    num / den
}

/// KL of the tilted distribution with mean `x` from the base, found by
/// bisection on the tilt parameter. Requires `m < x < M`.
pub fn tilt_rate(atoms: &[f64], weights: &[f64], x: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while tilted_mean(atoms, weights, lo) > x {
        lo *= 2.0;
    }
    while tilted_mean(atoms, weights, hi) < x {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tilted_mean(atoms, weights, mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l = 0.5 * (lo + hi);
    // KL(tilt, base) = λ E_tilt[X] − φ(λ)
    l * tilted_mean(atoms, weights, l) - log_mgf(atoms, weights, l)
}

/// `inf {KL(ν', ν) : E(ν') ≤ x}` for a finite distribution.
pub fn linf_below(atoms: &[f64], weights: &[f64], x: f64) -> f64 {
    let m = atoms[0];
    let mean = mean_of(atoms, weights);
    if x >= mean {
        0.0
    } else if x < m {
        f64::INFINITY
    } else if x == m {
        -weights[0].ln()
    } else {
        tilt_rate(atoms, weights, x)
    }
}

/// `inf {KL(ν', ν) : E(ν') ≥ x}` for a finite distribution.
pub fn linf_above(atoms: &[f64], weights: &[f64], x: f64) -> f64 {
    let big = *atoms.last().unwrap();
    let mean = mean_of(atoms, weights);
    if x <= mean {
        0.0
    } else if x > big {
        f64::INFINITY
    } else if x == big {
        -weights.last().unwrap().ln()
    } else {
        tilt_rate(atoms, weights, x)
    }
}

/// Root of an increasing `h` on `[lo, hi]` by bisection.
pub fn bisect(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `inf_{x ∈ [a, b]} max{up(x), down(x)}` for `up` increasing and `down`
/// decreasing, by locating their crossing.
pub fn crossing(up: impl Fn(f64) -> f64, down: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let g = |x: f64| up(x).max(down(x));
    if up(a) >= down(a) {
        return g(a);
    }
    if up(b) <= down(b) {
        return g(b);
    }
    let x = bisect(|x| up(x) - down(x), a, b);
    g(x)
}

/// Chernoff information `kl(x*, p) = kl(x*, q)` for an exponential family
/// given its mean divergence, `p < q`.
pub fn chernoff(d: impl Fn(f64, f64) -> f64, p: f64, q: f64) -> f64 {
    let x = bisect(|x| d(x, p) - d(x, q), p, q);
    d(x, p)
}

/// `1/2 + Σ_{i=2}^K 1/i`.
pub fn ovln(k: usize) -> f64 {
    0.5 + (2..=k).map(|i| 1.0 / i as f64).sum::<f64>()
}

/// `ln P(Bin(n, p) ≤ Bin(n, q))` for independent binomials, exactly.
pub fn ln_prob_binomial_not_above(n: u64, p: f64, q: f64) -> f64 {
    let ln_pmf = |n: u64, p: f64| -> Vec<f64> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut ln_c = 0.0;
        for k in 0..=n {
            if k > 0 {
                ln_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            out.push(ln_c + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln());
        }
        out
    };
    let a = ln_pmf(n, p);
    let b = ln_pmf(n, q);
    // P(S_b >= k), accumulated from the top
    let mut tail = vec![f64::NEG_INFINITY; n as usize + 2];
    for k in (0..=n as usize).rev() {
        tail[k] = log_add(tail[k + 1], b[k]);
    }
    let mut total = f64::NEG_INFINITY;
    for k in 0..=n as usize {
        total = log_add(total, a[k] + tail[k]);
    }
    total
}

fn log_add(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let m = x.max(y);
    m + ((x - m).exp() + (y - m).exp()).ln()
}

/// Standard normal upper tail.
pub fn normal_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Ordinary least squares slope.
pub fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
