//! Successive-rejects phase schedule.
//!
//! With `ov-ln K = 1/2 + Σ_{k=2}^K 1/k`, phase `r` has nominal length
//! `T / ov-ln K` for `r = 1` and `T / ((K − r + 2) ov-ln K)` for
//! `2 ≤ r ≤ K − 1`. Lengths are floored, the leftover `T − Σ ⌊ℓ_r⌋` goes to
//! phase 1, and each of the `K − r + 1` surviving arms is pulled
//! `⌊ℓ_r / (K − r + 1)⌋` times in phase `r`.

use serde::Serialize;

use crate::error::{Error, Result};

/// `ov-ln K` as an exact fraction `num / den`, or `None` if the common
/// denominator does not fit in 128 bits.
pub fn overline_ln_ratio(k: usize) -> Option<(u128, u128)> {
    fn gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    let (mut num, mut den) = (1u128, 2u128);
    for j in 2..=k as u128 {
        // num/den + 1/j
        let g = gcd(den, j);
        let lcm = (den / g).checked_mul(j)?;
        num = num.checked_mul(lcm / den)?.checked_add(lcm / j)?;
        den = lcm;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    Some((num, den))
}

/// `ov-ln K = 1/2 + Σ_{k=2}^K 1/k`.
pub fn overline_ln(k: usize) -> f64 {
    match overline_ln_ratio(k) {
        Some((n, d)) => n as f64 / d as f64,
        None => 0.5 + (2..=k).map(|j| 1.0 / j as f64).sum::<f64>(),
    }
}

/// Phase lengths, per-arm pulls and their limits for one `(K, T)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSchedule {
    pub k: usize,
    pub budget: u64,
    /// `ℓ_1, …, ℓ_{K−1}`, summing to `T`.
    pub phase_lengths: Vec<u64>,
    /// Pulls of each surviving arm in phase `r`.
    pub per_arm_pulls: Vec<u64>,
    /// `N_r`, the pulls of an arm that survives phases `1..=r`.
    pub cumulative: Vec<u64>,
    pub overline_ln_k: f64,
    /// `γ_r = 1 / ((K − r + 1) ov-ln K)`, the limit of `N_r / T`.
    pub gamma: Vec<f64>,
}

impl PhaseSchedule {
    pub fn phases(&self) -> usize {
        self.k - 1
    }

    /// Total pulls actually made; at most `T`.
    pub fn pulls_used(&self) -> u64 {
        self.per_arm_pulls
            .iter()
            .enumerate()
            .map(|(r, n)| n * (self.k - r) as u64)
            .sum()
    }
}

// floor(T / (c · ov-ln K))
fn floor_share(k: usize, t: u64, c: u64) -> u64 {
    match overline_ln_ratio(k) {
        Some((num, den)) => {
            if let Some(top) = (t as u128).checked_mul(den) {
                if let Some(bottom) = (c as u128).checked_mul(num) {
                    return (top / bottom) as u64;
                }
            }
            (t as f64 / (c as f64 * overline_ln(k))).floor() as u64
        }
        None => (t as f64 / (c as f64 * overline_ln(k))).floor() as u64,
    }
}

fn raw_schedule(k: usize, t: u64) -> PhaseSchedule {
    let ovln = overline_ln(k);
    let mut lengths: Vec<u64> = (1..k)
        .map(|r| {
            let c = if r == 1 { 1 } else { (k - r + 2) as u64 };
            floor_share(k, t, c)
        })
        .collect();
    let assigned: u64 = lengths.iter().sum();
    lengths[0] += t.saturating_sub(assigned);
    let per_arm: Vec<u64> = lengths
        .iter()
        .enumerate()
        .map(|(i, l)| l / (k - i) as u64)
        .collect();
    let cumulative = per_arm
        .iter()
        .scan(0u64, |acc, n| {
            *acc += n;
            Some(*acc)
        })
        .collect();
    let gamma = (1..k).map(|r| 1.0 / ((k - r + 1) as f64 * ovln)).collect();
    PhaseSchedule {
        k,
        budget: t,
        phase_lengths: lengths,
        per_arm_pulls: per_arm,
        cumulative,
        overline_ln_k: ovln,
        gamma,
    }
}

/// Smallest budget for which every phase pulls each surviving arm at least
/// once.
pub fn sr_min_budget(k: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::invalid(format!("successive rejects needs K >= 2, got {k}")));
    }
    let mut t = (k * (k - 1)) as u64;
    while raw_schedule(k, t).per_arm_pulls.contains(&0) {
        t += 1;
    }
    Ok(t)
}

/// The successive-rejects schedule for `K` arms and budget `T`.
pub fn sr_schedule(k: usize, t: u64) -> Result<PhaseSchedule> {
    let min = sr_min_budget(k)?;
    if t < min {
        return Err(Error::invalid(format!(
            "budget T = {t} is too small for successive rejects with K = {k}; minimum is {min}"
        )));
    }
    Ok(raw_schedule(k, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_values() {
        assert_eq!(overline_ln_ratio(2), Some((1, 1)));
        assert_eq!(overline_ln_ratio(3), Some((4, 3)));
        assert_eq!(overline_ln_ratio(4), Some((19, 12)));
        assert!((overline_ln(200) - (0.5 + (2..=200).map(|j| 1.0 / j as f64).sum::<f64>())).abs() < 1e-12);
    }

    #[test]
    fn three_arms_120() {
        let s = sr_schedule(3, 120).unwrap();
        assert_eq!(s.phase_lengths, vec![90, 30]);
        assert_eq!(s.per_arm_pulls, vec![30, 15]);
        assert_eq!(s.cumulative, vec![30, 45]);
        assert_eq!(s.overline_ln_k, 4.0 / 3.0);
        assert_eq!(s.gamma, vec![0.25, 0.375]);
        assert_eq!(s.pulls_used(), 120);
    }

    #[test]
    fn two_arms_and_remainder() {
        let s = sr_schedule(2, 100).unwrap();
        assert_eq!(s.phase_lengths, vec![100]);
        assert_eq!(s.cumulative, vec![50]);
        assert_eq!(s.overline_ln_k, 1.0);
        assert_eq!(s.gamma, vec![0.5]);
        assert_eq!(sr_schedule(3, 121).unwrap().phase_lengths, vec![91, 30]);
    }

    #[test]
    fn minimum_budget() {
        assert_eq!(sr_min_budget(2).unwrap(), 2);
        assert_eq!(sr_min_budget(3).unwrap(), 8);
        let err = sr_schedule(3, 7).unwrap_err().to_string();
        assert!(err.contains("minimum is 8"), "{err}");
        assert!(sr_schedule(1, 100).is_err());
        for k in 2..12 {
            let min = sr_min_budget(k).unwrap();
            assert!(min >= (k * (k - 1)) as u64);
            let s = sr_schedule(k, min).unwrap();
            assert!(s.cumulative.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
