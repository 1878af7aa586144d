use bai::dist::{kl_divergence, Distribution};
use bai_validation::*;
use proptest::prelude::*;

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, n).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    })
}

fn grid() -> Vec<f64> {
    vec![0.0, 0.2, 0.45, 0.7, 1.0]
}

fn mix(a: &[f64], b: &[f64], l: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| l * x + (1.0 - l) * y).collect()
}

fn finite_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum()
}

proptest! {
    #[test]
    fn kl_is_nonnegative_and_zero_only_on_equal(p in weights(5), q in weights(5)) {
        let g = grid();
        let (dp, dq) = (finite(&g, &p), finite(&g, &q));
        let v = kl_divergence(&dp, &dq).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!((v - finite_kl(&p, &q)).abs() < 1e-12);
        prop_assert_eq!(kl_divergence(&dp, &dp).unwrap(), 0.0);
        if p != q {
            prop_assert!(v > 0.0);
        }
    }

    #[test]
    fn kl_of_exponential_families_matches_closed_form(a in 0.01f64..0.99, b in 0.01f64..0.99, s2 in 0.1f64..5.0) {
        let bern = kl_divergence(&Distribution::bernoulli(a).unwrap(), &Distribution::bernoulli(b).unwrap()).unwrap();
        prop_assert!((bern - kl_bernoulli(a, b)).abs() < 1e-12);
        let gauss = kl_divergence(&Distribution::gaussian(a, s2).unwrap(), &Distribution::gaussian(b, s2).unwrap()).unwrap();
        prop_assert!((gauss - kl_gaussian(a, b, s2)).abs() < 1e-12);
        let pois = kl_divergence(&Distribution::poisson(a * 10.0).unwrap(), &Distribution::poisson(b * 10.0).unwrap()).unwrap();
        prop_assert!((pois - kl_poisson(a * 10.0, b * 10.0)).abs() < 1e-10);
        prop_assert!(bern >= 0.0 && gauss >= 0.0 && pois >= 0.0);
    }

    #[test]
    fn kl_is_jointly_convex(p1 in weights(5), p2 in weights(5), q1 in weights(5), q2 in weights(5)) {
        let g = grid();
        let kl = |p: &[f64], q: &[f64]| kl_divergence(&finite(&g, p), &finite(&g, q)).unwrap();
        for l in [0.25, 0.5, 0.75] {
            let lhs = kl(&mix(&p1, &p2, l), &mix(&q1, &q2, l));
            let rhs = l * kl(&p1, &q1) + (1.0 - l) * kl(&p2, &q2);
            prop_assert!(lhs <= rhs + 1e-12, "{} > {}", lhs, rhs);
        }
    }

    #[test]
    fn gaussian_kl_is_translation_invariant(m in -5.0f64..5.0, m2 in -5.0f64..5.0, c in -100.0f64..100.0, s2 in 0.1f64..4.0) {
        let kl = |a: f64, b: f64| {
            kl_divergence(&Distribution::gaussian(a, s2).unwrap(), &Distribution::gaussian(b, s2).unwrap()).unwrap()
        };
        let base = kl(m, m2);
        prop_assert!((kl(m + c, m2 + c) - base).abs() <= 1e-9 * (1.0 + base));
    }

    #[test]
    fn support_mismatch_gives_infinite_kl(p in weights(2)) {
        let a = finite(&[0.1, 0.9], &p);
        let b = finite(&[0.1, 0.5], &p);
        prop_assert_eq!(kl_divergence(&a, &b).unwrap(), f64::INFINITY);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn sample_means_concentrate(seed in any::<u64>(), p in 0.05f64..0.95, mu in 0.2f64..8.0, atoms in weights(5)) {
        let n = 100_000;
        let dists = [
            (Distribution::bernoulli(p).unwrap(), (p * (1.0 - p)).sqrt()),
            (Distribution::gaussian(mu, 2.0).unwrap(), 2f64.sqrt()),
            (Distribution::poisson(mu).unwrap(), mu.sqrt()),
            {
                let g = grid();
                let m = mean_of(&g, &atoms);
                let var: f64 = g.iter().zip(&atoms).map(|(x, w)| w * (x - m).powi(2)).sum();
                (finite(&g, &atoms), var.sqrt())
            },
        ];
        let mut r = rng(seed);
        for (d, sd) in &dists {
            let xs = d.sample_batch(n, &mut r);
            let mean = xs.iter().sum::<f64>() / n as f64;
            prop_assert!((mean - d.mean()).abs() <= 5.0 * sd / (n as f64).sqrt(), "{:?}: {}", d, mean);
        }
    }
}
