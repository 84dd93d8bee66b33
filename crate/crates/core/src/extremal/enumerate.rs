//! Maxima by sieving every `n <= x`; an oracle independent of the search.

use super::{Objective, SearchResult};
use crate::error::{Error, Result};
use crate::numerics::{factor_small, ExponentSignature};

pub const MAX_ENUMERATION: u64 = 10_000_000;

/// `d(n)` and `ω(n)` for `n <= x` by a linear sieve. Index 0 is unused.
pub fn divisor_and_omega_tables(x: usize) -> (Vec<u32>, Vec<u8>) {
    let mut d = vec![0u32; x + 1];
    let mut omega = vec![0u8; x + 1];
    // exponent of the smallest prime factor
    let mut low_exp = vec![0u8; x + 1];
    let mut primes: Vec<usize> = Vec::new();
    if x >= 1 {
        d[1] = 1;
    }
    for n in 2..=x {
        if d[n] == 0 {
            primes.push(n);
            d[n] = 2;
            omega[n] = 1;
            low_exp[n] = 1;
        }
        for &p in &primes {
            let m = n * p;
            if m > x {
                break;
            }
            if n % p == 0 {
                let e = low_exp[n] as u32;
                d[m] = d[n] / (e + 1) * (e + 2);
                omega[m] = omega[n];
                low_exp[m] = low_exp[n] + 1;
                break;
            }
            d[m] = d[n] * 2;
            omega[m] = omega[n] + 1;
            low_exp[m] = 1;
        }
    }
    (d, omega)
}

/// Maximum of `objective` over `1 <= n <= x`; the witness is the smallest
/// maximizing `n`, which is always in sorted-signature form.
pub fn full_enumeration_max(x: u64, objective: Objective) -> Result<SearchResult> {
    if x == 0 || x > MAX_ENUMERATION {
        return Err(Error::OutOfRange(format!("x = {x} outside 1..={MAX_ENUMERATION}")));
    }
    let (d, omega) = divisor_and_omega_tables(x as usize);
    let value = |n: usize| -> u128 {
        let dn = d[n] as usize;
        match objective {
            Objective::LogD => dn as u128,
            Objective::LogDd => d[dn] as u128,
            Objective::OmegaD => omega[dn] as u128,
        }
    };
    let mut best_n = 1usize;
    let mut best = value(1);
    for n in 2..=x as usize {
        let v = value(n);
        if v > best {
            best = v;
            best_n = n;
        }
    }
    let sig = ExponentSignature::from_multiset(factor_small(best_n as u64)?.exponents());
    Ok(SearchResult {
        objective,
        best_signature: sig,
        value: best,
        nodes: x,
        proven_optimal: true,
        near_boundary: false,
    })
}
