use num_bigint::BigUint;
use proptest::prelude::*;

use iterdiv::divisor::{d_exact, dd_exact, divisor_count_factored, log_dd, omega_d};
use iterdiv::extremal::{
    block_widths, optimal_construct, oracle_max, sorted_log_n, ConstructionParams, Objective,
};
use iterdiv::lab::{check_lemma3a, check_lemma3a_as_given, check_lemma3b_doubled, check_lemma4};
use iterdiv::mn::min_with_divisor_count;
use iterdiv::numerics::{factor_small, is_prime_u64, ExponentSignature, FactoredInteger, PrimeTable};

fn table() -> PrimeTable {
    PrimeTable::first(200).unwrap()
}

fn objective() -> impl Strategy<Value = Objective> {
    prop_oneof![Just(Objective::LogD), Just(Objective::LogDd), Just(Objective::OmegaD)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_monotone_in_budget(obj in objective(), l in 0.0f64..40.0, extra in 0.0f64..6.0) {
        let t = table();
        let small = oracle_max(l, obj, &t).unwrap();
        let large = oracle_max(l + extra, obj, &t).unwrap();
        prop_assert!(small.value <= large.value);
        prop_assert!(small.best_signature.ln(&t) <= l + 1e-9 * l.max(1.0));
    }

    #[test]
    fn oracle_value_matches_signature(obj in objective(), l in 0.0f64..60.0) {
        let t = table();
        let r = oracle_max(l, obj, &t).unwrap();
        let sig = &r.best_signature;
        let recomputed = match obj {
            Objective::LogD => d_exact(sig),
            Objective::LogDd => dd_exact(sig),
            Objective::OmegaD => BigUint::from(omega_d(sig)),
        };
        prop_assert_eq!(recomputed, BigUint::from(r.value));
    }

    #[test]
    fn construction_below_oracle(t_blocks in 1u64..8) {
        let t = table();
        let params = ConstructionParams::from_t(t_blocks as usize).unwrap();
        let built = optimal_construct(&params, &t).unwrap();
        prop_assume!(built.log_n < 80.0);
        let best = oracle_max(built.log_n + 1e-6, Objective::LogDd, &t).unwrap();
        prop_assert!(built.log_dd <= (best.value as f64).ln() + 1e-9);
    }

    #[test]
    fn sorted_layout_is_cheapest(t_blocks in 1u64..40) {
        let t = PrimeTable::first(20_000).unwrap();
        let params = ConstructionParams::from_t(t_blocks as usize).unwrap();
        let built = optimal_construct(&params, &t).unwrap();
        prop_assert!(built.log_n <= built.log_n_as_written + 1e-9 * built.log_n.max(1.0));
        let direct = sorted_log_n(&block_widths(t_blocks), &t).unwrap();
        prop_assert!((direct - built.log_n).abs() <= 1e-9 * direct.max(1.0));
    }

    #[test]
    fn block_widths_nonincreasing(t_blocks in 1u64..5000) {
        let a = block_widths(t_blocks);
        prop_assert_eq!(a.len() as u64, t_blocks);
        prop_assert!(a.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(a.iter().all(|&x| x >= 1));
        prop_assert_eq!(a[0], ((1.0 / (2f64.powf(1.0 / t_blocks as f64) - 1.0)).floor()) as u64);
    }

    #[test]
    fn mn_has_n_divisors(n in 1u64..20_000) {
        let t = table();
        let m = min_with_divisor_count(n, &t).unwrap();
        let d = divisor_count_factored(&m);
        prop_assert_eq!(d.to_u128(), Some(n as u128));
        let exps: Vec<u64> = m.exponents().collect();
        prop_assert!(exps.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn dd_depends_only_on_multiset(mut exps in prop::collection::vec(1u64..40, 1..12)) {
        let sig = ExponentSignature::from_multiset(exps.clone());
        exps.reverse();
        let other = ExponentSignature::from_multiset(exps);
        prop_assert_eq!(dd_exact(&sig), dd_exact(&other));
        let exact = dd_exact(&sig);
        let approx = log_dd(&sig);
        prop_assert!((approx - exact.to_string().parse::<f64>().unwrap().ln()).abs() < 1e-9);
    }

    #[test]
    fn lemma4_equality_iff_prime(m in 1u64..5_000_000) {
        let v = check_lemma4(&factor_small(m).unwrap());
        prop_assert!(v.holds);
        prop_assert_eq!(v.equality, is_prime_u64(m));
    }

    #[test]
    fn lemma3a_sorted_form_dominates(a in prop::collection::vec(1u64..1_000_000, 1..200)) {
        let sorted = check_lemma3a(&a).unwrap();
        let given = check_lemma3a_as_given(&a).unwrap();
        prop_assert!(sorted.holds);
        prop_assert!(given.holds);
        prop_assert!(sorted.rhs <= given.rhs + 1e-9 * given.rhs);
    }

    #[test]
    fn lemma3b_with_factor_two(big_a in 1u64..200, extra in prop::collection::vec(0u64..10_000, 1..100)) {
        let a: Vec<u64> = extra.iter().map(|e| big_a + e).collect();
        prop_assert!(check_lemma3b_doubled(&a, big_a).unwrap().holds);
    }

    #[test]
    fn factoring_round_trips(m in 1u64..=i64::MAX as u64) {
        let f = factor_small(m).unwrap();
        prop_assert_eq!(f.to_u128(), Some(m as u128));
        prop_assert!(f.factors().iter().all(|&(p, _)| is_prime_u64(p)));
    }

    #[test]
    fn factored_product(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let fa = factor_small(a).unwrap();
        let fb = factor_small(b).unwrap();
        prop_assert_eq!(fa.mul(&fb).to_u128(), Some(a as u128 * b as u128));
        prop_assert_eq!(FactoredInteger::one().mul(&fa), fa);
    }
}
