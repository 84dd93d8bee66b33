use num_bigint::BigUint;

use iterdiv::constant::{c_value, compute_c};
use iterdiv::extremal::{
    best_construction, choose_t, full_enumeration_max, oracle_max, oracle_max_exact, ramanujan_construct,
    Objective,
};
use iterdiv::mn::{brute_force_mn, min_with_divisor_count};
use iterdiv::numerics::PrimeTable;
use iterdiv::Error;

#[test]
fn recorded_oracle_values_at_one_million() {
    let t = PrimeTable::first(64).unwrap();
    let x = BigUint::from(1_000_000u32);
    // recorded from the full sieve over n <= 10^6
    let expect = [(Objective::LogD, 240u128), (Objective::LogDd, 20), (Objective::OmegaD, 4)];
    for (obj, value) in expect {
        let r = oracle_max_exact(&x, obj, &t).unwrap();
        assert_eq!(r.value, value, "{obj:?}");
        assert!(r.proven_optimal);
        assert_eq!(full_enumeration_max(1_000_000, obj).unwrap().value, value);
    }
}

#[test]
fn constant_agrees_with_series_estimate() {
    let r = compute_c(30).unwrap();
    assert!(r.rounded.starts_with("2.79598166413005871050772576"));
    // partial sum to 10^6 without the tail: about 1.4e-6 short
    let partial: f64 = (1..=1_000_000u64).map(|j| (1.0 / j as f64).ln_1p().powi(2)).sum();
    let truncated = (8.0 * partial).sqrt();
    assert!((c_value() - truncated - 1.43e-6).abs() < 1e-8);
}

#[test]
fn mn_matches_scan() {
    let t = PrimeTable::first(64).unwrap();
    for n in 1..=64u64 {
        let brute = brute_force_mn(n, 10_000_000).unwrap();
        let m = min_with_divisor_count(n, &t).unwrap();
        match brute {
            Some(b) => assert_eq!(m.to_u128(), Some(b as u128), "N = {n}"),
            None => assert!(m.ln() > (10_000_000f64).ln()),
        }
    }
}

#[test]
fn constructions_are_lower_bounds() {
    let t = PrimeTable::first(64).unwrap();
    for l in [20.0, 40.0, 60.0] {
        let (_, built) = best_construction(l, &t).unwrap();
        let best = oracle_max(l, Objective::LogDd, &t).unwrap();
        assert!(built.log_dd <= (best.value as f64).ln() + 1e-12);
    }
    let r = ramanujan_construct(5, &t).unwrap();
    assert_eq!(r.as_written, [1, 2, 4, 6, 10]);
}

#[test]
fn choose_t_domain() {
    assert!(matches!(choose_t(1e4), Err(Error::Domain(_))));
    assert!(matches!(choose_t(2.0), Err(Error::Domain(_))));
    assert_eq!(choose_t(1e6).unwrap().t, 5);
}
