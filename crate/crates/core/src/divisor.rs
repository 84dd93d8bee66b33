//! Divisor-count arithmetic on factored representations.
//!
//! `d(n) = ∏ (a_i + 1)` is returned in factored form, so `d(d(n))`, `ω(d(n))`
//! and friends never need `n` or `d(n)` as a number.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::numerics::{factor_small, ExponentSignature, FactoredInteger};

/// Factorization of `∏ (e + 1)` over the given exponents.
///
/// # Panics
/// If some `e + 1` exceeds `2^63 - 1`.
pub fn divisor_count_of_exponents<I: IntoIterator<Item = u64>>(exponents: I) -> FactoredInteger {
    let mut multiplicity: BTreeMap<u64, u64> = BTreeMap::new();
    for e in exponents {
        *multiplicity.entry(e).or_insert(0) += 1;
    }
    let mut merged: BTreeMap<u64, u64> = BTreeMap::new();
    for (e, count) in multiplicity {
        let f = factor_small(e + 1).expect("exponent out of range");
        for &(p, k) in f.factors() {
            *merged.entry(p).or_insert(0) += k * count;
        }
    }
    FactoredInteger::from_sorted_unchecked(merged.into_iter().collect())
}

/// `d(n)` as a factored integer.
pub fn divisor_count_factored(n: &FactoredInteger) -> FactoredInteger {
    divisor_count_of_exponents(n.exponents())
}

/// `Ω(n)`, the number of prime factors counted with multiplicity.
pub fn big_omega(n: &FactoredInteger) -> u64 {
    n.exponents().sum()
}

/// `ln d(m)` where `m` is given by its exponents.
fn ln_divisor_count(exponents: impl Iterator<Item = u64>) -> f64 {
    exponents
        .map(|e| ((e + 1) as f64).ln())
        .collect::<crate::numerics::Neumaier>()
        .sum()
}

/// `ln d(d(n))` for the integer denoted by `sig`.
pub fn log_dd(sig: &ExponentSignature) -> f64 {
    log_dd_exponents(sig.exponents().iter().copied())
}

/// `ln d(d(n))` for any exponent multiset.
pub fn log_dd_exponents<I: IntoIterator<Item = u64>>(exponents: I) -> f64 {
    ln_divisor_count(divisor_count_of_exponents(exponents).exponents())
}

/// `d(d(n))` exactly.
pub fn dd_exact(sig: &ExponentSignature) -> BigUint {
    dd_exact_exponents(sig.exponents().iter().copied())
}

pub fn dd_exact_exponents<I: IntoIterator<Item = u64>>(exponents: I) -> BigUint {
    divisor_count_of_exponents(exponents)
        .exponents()
        .fold(BigUint::one(), |acc, e| acc * BigUint::from(e + 1))
}

/// `d(n)` exactly.
pub fn d_exact(sig: &ExponentSignature) -> BigUint {
    sig.exponents()
        .iter()
        .fold(BigUint::one(), |acc, &e| acc * BigUint::from(e + 1))
}

/// `ω(d(n))`, the number of distinct primes dividing `d(n)`.
pub fn omega_d(sig: &ExponentSignature) -> usize {
    divisor_count_of_exponents(sig.exponents().iter().copied()).omega()
}
