//! Primes, factorizations, signatures and precision-controlled arithmetic.

mod factor;
mod hp;
mod primes;
mod signature;

pub use factor::{factor_small, is_prime_u64, FactoredInteger};
pub use hp::{Fixed, HighPrecisionReal};
pub use primes::{Neumaier, PrimeTable, DEFAULT_PRIME_CEILING, MAX_PRIME_COUNT};
pub use signature::{compare_factored, log_of_signature, ExponentSignature};

pub(crate) use primes::simple_sieve;

use crate::error::{Error, Result};

/// `j (ln j + ln ln j)`, the leading terms of the asymptotic for the j-th
/// prime. Only for sizing and diagnostics.
pub fn nth_prime_approx(j: u64) -> Result<f64> {
    if j < 3 {
        return Err(Error::Domain(format!("nth_prime_approx needs j >= 3, got {j}")));
    }
    let j = j as f64;
    Ok(j * (j.ln() + j.ln().ln()))
}

/// `ln` applied `k` times to `x`.
pub fn iterated_log(x: f64, k: u32) -> Result<f64> {
    let mut v = x;
    for step in 0..k {
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "iterated log undefined: iterate {step} of {x} is {v}"
            )));
        }
        v = v.ln();
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn nth_prime_approx_examples() {
        let v = nth_prime_approx(3).unwrap();
        assert!((v - 3.0 * (3f64.ln() + 3f64.ln().ln())).abs() < 1e-12);
        assert!((v - 3.578).abs() < 1e-3);
        assert!(nth_prime_approx(2).is_err());
        assert!(nth_prime_approx(101).unwrap() > nth_prime_approx(100).unwrap());
    }

    #[test]
    fn nth_prime_approx_vs_sieve() {
        let table = PrimeTable::first(1_000_000).unwrap();
        let truth = table.prime(999_999) as f64;
        assert_eq!(truth, 15_485_863.0);
        let ratio = nth_prime_approx(1_000_000).unwrap() / truth;
        assert!((0.9..=1.1).contains(&ratio), "{ratio}");
    }

    #[test]
    fn iterated_log_examples() {
        assert!((iterated_log(E, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((iterated_log(E.powf(E), 2).unwrap() - 1.0).abs() < 1e-14);
        let v = iterated_log(1e6, 2).unwrap();
        assert!((v - 2.626).abs() < 1e-3);
        assert!(iterated_log(0.5, 2).is_err()); // ln 0.5 < 0
        assert!(iterated_log(-1.0, 1).is_err());
        assert_eq!(iterated_log(7.0, 0).unwrap(), 7.0);
    }
}
