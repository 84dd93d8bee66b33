//! Certified evaluation of `c = (8 Σ_{j>=1} ln²(1 + 1/j))^(1/2)`.
//!
//! The sum is split at `A`:
//!
//! * `j < A` is summed directly. Each `ln(1 + 1/j) = 2 atanh(1/(2j+1))` is an
//!   alternating-free series of exact rationals, so every term costs one
//!   truncation.
//! * `j >= A` uses `ln²(1+u) = Σ_{k>=2} b_k u^k` with
//!   `b_k = (-1)^k 2 H_{k-1} / k`, giving `Σ_k b_k ζ(k, A)`. Each Hurwitz zeta
//!   value comes from Euler–Maclaurin with Bernoulli numbers, all in exact
//!   rationals.
//!
//! Remainders, all bounded in closed form:
//!
//! * series in `k` cut at `K`: `|b_k| <= 2`, `ζ(k, A) <= 2 A^(1-k)`, so the
//!   rest is at most `8 A^-K`;
//! * Euler–Maclaurin for `x^-s` with `M` Bernoulli terms: at most
//!   `2 ζ(2M+1) (s)_{2M} / ((2π)^(2M+1) A^(s+2M))`, where `(s)_n` is the rising
//!   factorial.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{Fixed, HighPrecisionReal, Neumaier};

pub const MAX_DIGITS: u32 = 50;

const GUARD_DIGITS: u32 = 15;

#[derive(Debug, Clone)]
pub struct CResult {
    pub c: HighPrecisionReal,
    /// Number of terms `j < A` summed directly.
    pub terms_summed: u64,
    /// Bound on the error of the tail approximation (before rounding).
    pub tail_bound: f64,
    pub digits: u32,
    /// `c` rounded half-up to `digits` decimal places.
    pub rounded: String,
}

/// `c` to `digits` decimal places with a certified error below `10^-digits`.
pub fn compute_c(digits: u32) -> Result<CResult> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::PrecisionInfeasible { digits, max: MAX_DIGITS });
    }
    let split = 32 * u64::from(digits + GUARD_DIGITS);
    let mut bits = ((digits + GUARD_DIGITS) as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32;
    loop {
        let (c, tail_bound) = c_interval(split, bits);
        if c.err_below_decimal(digits) {
            if let Some(rounded) = c.round_decimal(digits) {
                return Ok(CResult { c, terms_summed: split - 1, tail_bound, digits, rounded });
            }
        }
        bits += 64;
    }
}

/// `c` as a double, from a 20-digit certified evaluation.
pub fn c_value() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| compute_c(20).expect("20 digits is in range").c.to_f64())
}

/// `c` at `bits` fractional bits with its error bound.
pub fn c_high_precision(bits: u32) -> HighPrecisionReal {
    c_interval(1024, bits).0
}

/// `1/A`, an upper bound for `Σ_{j>A} ln²(1 + 1/j)`
/// (from `ln(1 + 1/j) < 1/j` and `Σ_{j>A} 1/j² < 1/A`).
pub fn tail_upper_bound(a: u64) -> f64 {
    assert!(a >= 1);
    1.0 / a as f64
}

/// `Σ_{j<=a} ln²(1 + 1/j)` in compensated double precision.
pub fn partial_sum_f64(a: u64) -> f64 {
    (1..=a)
        .map(|j| {
            let l = (1.0 / j as f64).ln_1p();
            l * l
        })
        .collect::<Neumaier>()
        .sum()
}

/// `Σ_{j<=a} ln²(1 + 1/j)` at `bits` fractional bits, with its error bound.
pub fn partial_sum_high_precision(a: u64, bits: u32) -> HighPrecisionReal {
    let (sum, err) = direct_sum(a + 1, bits);
    HighPrecisionReal::new(sum, err)
}

/// `(c, tail_bound)` with `split` the first index handled by the tail.
fn c_interval(split: u64, bits: u32) -> (HighPrecisionReal, f64) {
    let (direct, direct_err) = direct_sum(split, bits);
    let (tail, tail_ulps, tail_bound) = tail_sum(split, bits);
    let sum = &direct + &tail;
    let sum_err = direct_err + tail_ulps + 1u32;

    // c = sqrt(8 S); |dc| <= 8 |dS| / (2 sqrt(8 S)) < 1.5 |dS| since S > 0.9
    let c = sum.mul_int(8).sqrt();
    let c_err = sum_err * 2u32 + 2u32;
    (HighPrecisionReal::new(c, c_err), tail_bound)
}

/// `Σ_{1<=j<split} ln²(1 + 1/j)` and its error in ulps.
fn direct_sum(split: u64, bits: u32) -> (Fixed, BigUint) {
    let mut sum = Fixed::zero(bits);
    let mut err = BigUint::zero();
    let unit = BigInt::one() << bits;
    for j in 1..split {
        // atanh(1/q) = Σ_k 1/((2k+1) q^(2k+1))
        let q = BigInt::from(2 * j + 1);
        let q2 = &q * &q;
        let mut power = q.clone();
        let mut half_log = BigInt::zero();
        let mut k = 0u64;
        loop {
            let den = &power * (2 * k + 1);
            if den > unit {
                break;
            }
            half_log += &unit / &den;
            power *= &q2;
            k += 1;
        }
        // k truncations plus a remainder below 9/8 ulp
        let log_err = 2 * (k + 2);
        let log = Fixed::from_mantissa(half_log * 2, bits);
        sum = &sum + &(&log * &log);
        // (L + e)² - L² <= 2e + e² with L < 1, plus one truncation
        err += 2 * log_err + 2;
    }
    (sum, err)
}

/// Tail `Σ_{j>=split} ln²(1 + 1/j)`: (value, error in ulps, error as f64).
fn tail_sum(split: u64, bits: u32) -> (Fixed, BigUint, f64) {
    let a = split as f64;
    let log2_a = a.log2();
    let target = -(bits as f64) - 4.0;

    // series in k cut where 8 A^-K < 2^target
    let k_max = ((3.0 - target) / log2_a).ceil() as u64;
    let mut bound = 2f64.powf(3.0 - k_max as f64 * log2_a);

    let bernoulli = bernoulli_even(64);
    let big_a = BigInt::from(split);
    let mut total = BigRational::zero();
    let mut harmonic = BigRational::one(); // H_{k-1}, starting at k = 2
    for k in 2..=k_max {
        let zeta = hurwitz_zeta(k, &big_a, &bernoulli, target - (k_max as f64).log2(), &mut bound);
        let b_k = harmonic.clone() * BigInt::from(2) / BigInt::from(k);
        let b_k = if k % 2 == 0 { b_k } else { -b_k };
        total += b_k * zeta;
        harmonic += BigRational::new(BigInt::one(), BigInt::from(k));
    }
    let value = Fixed::from_ratio(total.numer(), total.denom(), bits);
    // bound <= 2^e  =>  bound·2^bits ulps <= 2^(e + bits)
    let exponent = bound.log2().ceil() + 1.0 + bits as f64;
    let ulps = if exponent <= 0.0 {
        BigUint::one()
    } else {
        BigUint::one() << (exponent as u64)
    };
    (value, ulps, bound)
}

/// Euler–Maclaurin approximation of `ζ(s, a)`, adding the remainder bound
/// (which must fall below `2^log2_target`) to `bound`.
fn hurwitz_zeta(
    s: u64,
    a: &BigInt,
    bernoulli: &[BigRational],
    log2_target: f64,
    bound: &mut f64,
) -> BigRational {
    let af = a.to_f64().expect("finite split point");
    let pow = |e: u64| a.pow(e as u32);
    // a^(1-s)/(s-1) + a^-s/2
    let mut z = BigRational::new(BigInt::one(), pow(s - 1) * BigInt::from(s - 1))
        + BigRational::new(BigInt::one(), pow(s) * 2);
    let mut rising = BigInt::from(s); // (s)_{2m-1}
    let mut factorial = BigInt::from(2); // (2m)!
    let mut m = 1u64;
    loop {
        let term = bernoulli[m as usize].clone() * BigRational::new(rising.clone(), factorial.clone() * pow(s + 2 * m - 1));
        z += term;
        // remainder after m terms: 2 ζ(2m+1) (s)_{2m} / ((2π)^(2m+1) a^(s+2m)), ζ(3) < 1.21
        let log2_rem = 2.42f64.log2() + log2_rising(s, 2 * m)
            - (2 * m + 1) as f64 * std::f64::consts::TAU.log2()
            - (s + 2 * m) as f64 * af.log2();
        if log2_rem < log2_target || m as usize + 1 >= bernoulli.len() {
            *bound += 2f64.powf(log2_rem);
            assert!(log2_rem < log2_target, "not enough Bernoulli numbers");
            return z;
        }
        rising *= BigInt::from((s + 2 * m - 1) * (s + 2 * m));
        factorial *= BigInt::from((2 * m + 1) * (2 * m + 2));
        m += 1;
    }
}

fn log2_rising(s: u64, n: u64) -> f64 {
    (0..n).map(|i| ((s + i) as f64).log2()).sum()
}

/// `[B_0, B_2, B_4, ..., B_{2(n-1)}]`.
fn bernoulli_even(n: usize) -> Vec<BigRational> {
    let len = 2 * n;
    let mut b: Vec<BigRational> = Vec::with_capacity(len);
    b.push(BigRational::one());
    for m in 1..len {
        // Σ_{k=0}^{m} C(m+1, k) B_k = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            acc += bk.clone() * binom.clone();
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigInt::from(m + 1));
    }
    b.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent reference (mpmath, 60 digits):
    // c = 2.79598166413005871050772576304551326896870840172709...
    const C_REF: &str = "2.795981664130058710507725763045731041104990540615948277752105";

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_even(5);
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(b[1], r(1, 6));
        assert_eq!(b[2], r(-1, 30));
        assert_eq!(b[3], r(1, 42));
        assert_eq!(b[4], r(-1, 30));
    }

    #[test]
    fn hurwitz_against_direct_sum() {
        // ζ(2, 10) = π²/6 - Σ_{j<10} 1/j²
        let b = bernoulli_even(40);
        let mut bound = 0.0;
        let z = hurwitz_zeta(2, &BigInt::from(10), &b, -60.0, &mut bound);
        let head: f64 = (1..10).map(|j| 1.0 / (j * j) as f64).sum();
        let expect = std::f64::consts::PI.powi(2) / 6.0 - head;
        let got = Fixed::from_ratio(z.numer(), z.denom(), 80).to_f64();
        assert!((got - expect).abs() < 1e-15, "{got} vs {expect}");
        assert!(bound < 1e-17);
    }

    #[test]
    fn ten_digits() {
        let r = compute_c(10).unwrap();
        assert_eq!(r.rounded, "2.7959816641");
        assert!(r.c.err_below_decimal(10));
        assert!(r.c.err_f64() < 1e-20);
    }

    #[test]
    fn one_digit() {
        assert_eq!(compute_c(1).unwrap().rounded, "2.8");
    }

    #[test]
    fn fifty_digits_match_reference() {
        let r = compute_c(MAX_DIGITS).unwrap();
        assert_eq!(r.rounded, reference_rounded(MAX_DIGITS));
        assert!(r.c.err_below_decimal(MAX_DIGITS));
    }

    #[test]
    fn out_of_range_digits() {
        assert!(matches!(compute_c(0), Err(Error::PrecisionInfeasible { .. })));
        assert!(matches!(compute_c(99), Err(Error::PrecisionInfeasible { .. })));
    }

    /// Half-up rounding of the 60-place reference to `d` places.
    fn reference_rounded(d: u32) -> String {
        let places = C_REF.len() as u32 - 2;
        let all: BigInt = C_REF.replace('.', "").parse().unwrap();
        let scale = BigInt::from(10u32).pow(places - d);
        let r: BigInt = (all + &scale / 2) / &scale;
        let s = r.to_string();
        format!("{}.{}", &s[..1], &s[1..])
    }

    #[test]
    fn shared_digits_agree() {
        for d in 1..=MAX_DIGITS {
            assert_eq!(compute_c(d).unwrap().rounded, reference_rounded(d), "digits = {d}");
        }
    }

    #[test]
    fn truncated_sum_at_one_million() {
        // Stopping at j = 10^6 with no tail gives 2.7959802335..., which is
        // 1.4e-6 below the true value, consistent with a tail of about 1/A.
        let s = partial_sum_f64(1_000_000);
        let truncated = (8.0 * s).sqrt();
        assert!((truncated - 2.795_980_233_5).abs() < 1e-10, "{truncated}");
        let c = c_value();
        assert!(c - truncated > 1.4e-6 && c - truncated < 1.5e-6);
    }

    #[test]
    fn tail_bound_examples() {
        assert_eq!(tail_upper_bound(1), 1.0);
        assert_eq!(tail_upper_bound(100), 0.01);
        // true tail at A = 100 sits between the partial tail to 10^6 and 1/A
        let s_inf = c_value().powi(2) / 8.0;
        let tail = s_inf - partial_sum_f64(100);
        let partial_tail = partial_sum_f64(1_000_000) - partial_sum_f64(100);
        assert!(tail <= 0.01);
        assert!(tail >= partial_tail);
    }

    #[test]
    fn bracketing() {
        let c = c_value();
        for a in [10u64, 1_000, 100_000] {
            let s = partial_sum_f64(a);
            let gap = c * c / 8.0 - s;
            assert!(gap > 0.0 && gap <= 1.0 / a as f64, "A = {a}: gap {gap}");
            assert!((8.0 * s).sqrt() <= c && c <= (8.0 * s + 8.0 / a as f64).sqrt());
        }
    }

    #[test]
    fn high_precision_partial_sum() {
        let hp = partial_sum_high_precision(1000, 128);
        assert!((hp.to_f64() - partial_sum_f64(1000)).abs() < 1e-14);
    }
}
