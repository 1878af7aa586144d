use bai::dist::Distribution;
use bai::problem::{analyze_problem, BanditProblem};
use bai::schedule::{sr_min_budget, sr_schedule};
use bai::stream::child_rng;
use bai::strategy::{run_strategy, run_with_rewards, RewardTable, StrategyKind};
use bai_validation::*;
use proptest::prelude::*;

fn bernoulli_problem(ps: &[f64]) -> BanditProblem {
    analyze_problem(ps.iter().map(|&p| Distribution::bernoulli(p).unwrap()).collect()).unwrap()
}

fn problem() -> impl Strategy<Value = BanditProblem> {
    prop::collection::vec(0.05f64..0.95, 2..7).prop_map(|ps| bernoulli_problem(&ps))
}

proptest! {
    #[test]
    fn sr_pull_counts_follow_the_schedule(p in problem(), extra in 0u64..500, seed in any::<u64>()) {
        let k = p.k();
        let t = sr_min_budget(k).unwrap() + extra;
        let s = sr_schedule(k, t).unwrap();
        let tr = run_strategy(StrategyKind::SuccessiveRejects, &p, t, child_rng(seed, t, 0)).unwrap();
        prop_assert_eq!(tr.rejection_order.len(), k - 1);
        for (r, &a) in tr.rejection_order.iter().enumerate() {
            prop_assert_eq!(tr.pulls[a], s.cumulative[r]);
        }
        prop_assert_eq!(tr.pulls[tr.recommendation], s.cumulative[k - 2]);
        prop_assert!(!tr.rejection_order.contains(&tr.recommendation));
        prop_assert_eq!(tr.rewards_consumed, tr.pulls.iter().sum::<u64>());
        prop_assert!(tr.rewards_consumed <= t);
        prop_assert_eq!(s.phase_lengths.iter().sum::<u64>(), t);
    }

    #[test]
    fn schedule_approaches_its_limits(k in 2usize..=10, t in 1_000u64..200_000) {
        let s = sr_schedule(k, t).unwrap();
        for r in 1..k {
            let gamma = 1.0 / ((k + 1 - r) as f64 * ovln(k));
            prop_assert!((s.gamma[r - 1] - gamma).abs() < 1e-15);
            prop_assert!((s.cumulative[r - 1] as f64 / t as f64 - gamma).abs() <= k as f64 / t as f64);
        }
    }

    #[test]
    fn runs_are_deterministic(p in problem(), seed in any::<u64>(), kind in prop_oneof![
        Just(StrategyKind::SuccessiveRejects), Just(StrategyKind::Uniform), Just(StrategyKind::SequentialHalving)
    ]) {
        let t = kind.min_budget(p.k()).unwrap() + 60;
        let a = run_strategy(kind, &p, t, child_rng(seed, t, 3)).unwrap();
        let b = run_strategy(kind, &p, t, child_rng(seed, t, 3)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn two_arm_sr_is_uniform_allocation(m1 in -1.0f64..1.0, m2 in -1.0f64..1.0, half in 1usize..200, seed in any::<u64>()) {
        let p = analyze_problem(vec![
            Distribution::gaussian(m1, 1.0).unwrap(),
            Distribution::gaussian(m2, 1.0).unwrap(),
        ]).unwrap();
        let t = 2 * half as u64;
        let table = RewardTable::sample(&p, half, &mut rng(seed));
        let sr = run_with_rewards(StrategyKind::SuccessiveRejects, 2, t, &mut table.clone()).unwrap();
        let un = run_with_rewards(StrategyKind::Uniform, 2, t, &mut table.clone()).unwrap();
        prop_assert_eq!(sr.recommendation, un.recommendation);
        prop_assert_eq!(sr.pulls, un.pulls);
    }

    #[test]
    fn uniform_and_halving_spend_within_budget(p in problem(), extra in 0u64..300, seed in any::<u64>()) {
        for kind in [StrategyKind::Uniform, StrategyKind::SequentialHalving] {
            let t = kind.min_budget(p.k()).unwrap() + extra;
            let tr = run_strategy(kind, &p, t, child_rng(seed, t, 0)).unwrap();
            prop_assert!(tr.rewards_consumed <= t);
            prop_assert!(tr.recommendation < p.k());
            if kind == StrategyKind::Uniform {
                prop_assert!(tr.pulls.iter().all(|&n| n == t / p.k() as u64));
            } else {
                prop_assert_eq!(tr.rejection_order.len(), p.k() - 1);
            }
        }
    }
}

#[test]
fn diracs_are_identified_exactly() {
    let p = analyze_problem(
        [0.2, 0.9, 0.5, 0.1]
            .iter()
            .map(|&x| Distribution::dirac(x).unwrap())
            .collect(),
    )
    .unwrap();
    let tr = run_strategy(StrategyKind::SuccessiveRejects, &p, 100, child_rng(0, 0, 0)).unwrap();
    assert_eq!(tr.rejection_order, vec![3, 0, 2]);
    assert_eq!(tr.recommendation, 1);
}

#[test]
fn budgets_below_the_minimum_are_rejected() {
    let p = bernoulli_problem(&[0.3, 0.5, 0.7]);
    let err = run_strategy(StrategyKind::SuccessiveRejects, &p, 7, child_rng(0, 0, 0)).unwrap_err();
    assert!(err.to_string().contains("minimum is 8"), "{err}");
}
