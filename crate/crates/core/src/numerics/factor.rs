//! Factored integers and factorization of machine-size integers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer stored as its prime factorization, primes strictly ascending.
/// The empty factorization is `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FactoredInteger {
    factors: Vec<(u64, u64)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { factors: Vec::new() }
    }

    /// Builds from `(prime, exponent)` pairs. Pairs may come in any order and
    /// repeated primes are merged; zero exponents are dropped. Every base is
    /// checked for primality.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut map: BTreeMap<u64, u64> = BTreeMap::new();
        for (p, e) in pairs {
            if e == 0 {
                continue;
            }
            if !is_prime_u64(p) {
                return Err(Error::Precondition(format!("{p} is not prime")));
            }
            let slot = map.entry(p).or_insert(0);
            *slot = slot
                .checked_add(e)
                .ok_or_else(|| Error::OutOfRange("exponent overflow".into()))?;
        }
        Ok(FactoredInteger { factors: map.into_iter().collect() })
    }

    /// Builds from pairs already known to be prime, ascending and distinct.
    pub(crate) fn from_sorted_unchecked(factors: Vec<(u64, u64)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, e)| e > 0));
        FactoredInteger { factors }
    }

    pub fn factors(&self) -> &[(u64, u64)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of distinct prime factors, ω(n).
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn exponents(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(_, e)| e)
    }

    /// Natural logarithm, summed in double precision.
    pub fn ln(&self) -> f64 {
        self.factors
            .iter()
            .map(|&(p, e)| e as f64 * (p as f64).ln())
            .collect::<crate::numerics::Neumaier>()
            .sum()
    }

    /// The exact value. Cost grows with the size of the number.
    pub fn to_biguint(&self) -> BigUint {
        let mut acc = BigUint::one();
        for &(p, e) in &self.factors {
            let e = u32::try_from(e).expect("exponent too large to materialize");
            acc *= BigUint::from(p).pow(e);
        }
        acc
    }

    /// The value if it fits in a `u128`.
    pub fn to_u128(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p as u128)?;
            }
        }
        Some(acc)
    }

    /// Product of two factored integers.
    pub fn mul(&self, other: &FactoredInteger) -> FactoredInteger {
        let mut map: BTreeMap<u64, u64> = self.factors.iter().copied().collect();
        for &(p, e) in &other.factors {
            *map.entry(p).or_insert(0) += e;
        }
        FactoredInteger { factors: map.into_iter().collect() }
    }
}

impl fmt::Display for FactoredInteger {
    /// Formats as `2^3·3·5`, or `1` for the empty product.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

const SPF_LIMIT: usize = 1 << 20;

/// Smallest-prime-factor table for `m < SPF_LIMIT`.
fn spf_table() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut spf = vec![0u32; SPF_LIMIT];
        for i in 2..SPF_LIMIT {
            if spf[i] == 0 {
                let mut j = i;
                while j < SPF_LIMIT {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        spf
    })
}

/// Exact factorization of `m` (`1 <= m < 2^63`).
///
/// Below 2^20 a smallest-prime-factor table is used; larger values go through
/// trial division by small primes followed by Miller–Rabin and Pollard–Brent.
pub fn factor_small(m: u64) -> Result<FactoredInteger> {
    if m == 0 || m > i64::MAX as u64 {
        return Err(Error::OutOfRange(format!("cannot factor {m}")));
    }
    let mut primes = Vec::new();
    collect_prime_factors(m, &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u64, u64)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(FactoredInteger { factors })
}

/// Pushes every prime factor of `m` with multiplicity.
fn collect_prime_factors(mut m: u64, out: &mut Vec<u64>) {
    if m < SPF_LIMIT as u64 {
        let spf = spf_table();
        while m > 1 {
            let p = spf[m as usize] as u64;
            out.push(p);
            m /= p;
        }
        return;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while m.is_multiple_of(p) {
            out.push(p);
            m /= p;
        }
    }
    let mut d = 41u64;
    while d < 1 << 12 && d * d <= m {
        while m.is_multiple_of(d) {
            out.push(d);
            m /= d;
        }
        d += 2;
    }
    if m == 1 {
        return;
    }
    if m < SPF_LIMIT as u64 {
        collect_prime_factors(m, out);
    } else if is_prime_u64(m) {
        out.push(m);
    } else {
        let f = pollard_brent(m);
        collect_prime_factors(f, out);
        collect_prime_factors(m / f, out);
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..128.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}
