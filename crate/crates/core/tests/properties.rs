use chrestenson::correction::{lemma1_construct, WalshIndex};
use chrestenson::greedy::{greedy_error_curve, order_pairs, DEFAULT_HARD_ZERO};
use chrestenson::{analyze, synthesize, AdicInterval, Config, Method, Norm, StepFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = (u32, u32)> {
    (2u32..=5).prop_flat_map(|a| {
        let top = match a {
            2 => 6u32,
            3 => 4,
            _ => 3,
        };
        (Just(a), 0u32..=top)
    })
}

fn step() -> impl Strategy<Value = StepFunction> {
    grid().prop_flat_map(|(a, level)| {
        let n = (a as usize).pow(level);
        prop::collection::vec((-4.0f64..4.0, -4.0f64..4.0), n).prop_map(move |v| {
            StepFunction::new(a, level, v.into_iter().map(|(x, y)| Complex64::new(x, y)).collect()).unwrap()
        })
    })
}

fn max_dev(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn parseval(f in step()) {
        let spec = analyze(&f, Method::Fast).unwrap();
        let l2 = f.norm(Norm::L2).powi(2);
        prop_assert!((spec.energy() - l2).abs() <= 1e-10 * l2.max(1.0));
    }

    #[test]
    fn round_trip(f in step()) {
        let spec = analyze(&f, Method::Fast).unwrap();
        let back = synthesize(&spec, f.level()).unwrap();
        prop_assert!(max_dev(back.values(), f.values()) < 1e-10);
    }

    #[test]
    fn fast_matches_naive(f in step()) {
        let fast = analyze(&f, Method::Fast).unwrap();
        let naive = analyze(&f, Method::Naive).unwrap();
        prop_assert!(max_dev(fast.coefficients(), naive.coefficients()) < 1e-9);
    }

    #[test]
    fn refinement_keeps_coefficients(f in step()) {
        let coarse = analyze(&f, Method::Fast).unwrap();
        let fine = analyze(&f.refine(f.level() + 1).unwrap(), Method::Fast).unwrap();
        let n = coarse.coefficients().len();
        prop_assert!(max_dev(&fine.coefficients()[..n], coarse.coefficients()) < 1e-10);
        prop_assert!(fine.coefficients()[n..].iter().all(|c| c.norm() < 1e-10));
    }

    #[test]
    fn dilation_preserves_norms(f in step(), s in 0u32..3) {
        let config = Config::for_order(f.order()).unwrap();
        let g = f.dilate(s, &config).unwrap();
        for p in [Norm::L1, Norm::L2, Norm::Sup] {
            let (x, y) = (f.norm(p), g.norm(p));
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn greedy_ranking_ignores_input_order(
        mags in prop::collection::vec(0.0f64..3.0, 1..40),
        seed in any::<u64>(),
    ) {
        let pairs: Vec<(u64, Complex64)> =
            mags.iter().enumerate().map(|(n, m)| (n as u64, Complex64::new(*m, 0.0))).collect();
        let mut shuffled = pairs.clone();
        let len = shuffled.len();
        for i in (1..len).rev() {
            let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize;
            shuffled.swap(i, j);
        }
        let a = order_pairs(&pairs, DEFAULT_HARD_ZERO);
        let b = order_pairs(&shuffled, DEFAULT_HARD_ZERO);
        prop_assert_eq!(a.ranked, b.ranked);
    }

    #[test]
    fn l2_greedy_tail_is_monotone(f in step()) {
        let curve = greedy_error_curve(&f, usize::MAX, Norm::L2).unwrap();
        prop_assert!(curve.windows(2).all(|w| w[1].error <= w[0].error + 1e-12));
        prop_assert!(curve.last().unwrap().error < 1e-9 * f.norm(Norm::L2).max(1.0));
    }

    #[test]
    fn lemma1_is_linear_in_gamma(
        a in prop::sample::select(vec![2u32, 3, 5]),
        m in 1u32..=2,
        k in any::<u64>(),
        eps in 0.05f64..0.9,
        re in -10.0f64..10.0,
        im in -10.0f64..10.0,
        n0 in 2u64..=50,
    ) {
        let gamma = Complex64::new(re, im);
        prop_assume!(gamma.norm() > 0.1);
        let config = Config::for_order(a).unwrap();
        let d = AdicInterval::from_cell(a, m, k % (a as u64).pow(m)).unwrap();
        let one = lemma1_construct(Complex64::new(1.0, 0.0), n0, eps, &d, &config).unwrap();
        let scaled = lemma1_construct(gamma, n0, eps, &d, &config).unwrap();
        prop_assert!(scaled.certificate.passed(), "{}", scaled.certificate);
        prop_assert_eq!(one.polynomial.indices(), scaled.polynomial.indices());
        for ((_, c1), (_, cg)) in one.polynomial.terms().iter().zip(scaled.polynomial.terms()) {
            prop_assert!((c1 * gamma - cg).norm() <= 1e-12 * gamma.norm());
        }
    }

    #[test]
    fn walsh_index_arithmetic(a in 2u32..=7, n in 0u64..1_000_000_000) {
        let i = WalshIndex::from_u64(a, n);
        prop_assert_eq!(i.to_u64(), Some(n));
        prop_assert_eq!(i.add_one().to_u64(), Some(n + 1));
        prop_assert_eq!(WalshIndex::parse(a, &i.to_string()).unwrap(), i.clone());
        prop_assert!(i < i.add_one());
    }
}
