//! Exponent signatures: integers of the form p_1^b_1 ⋯ p_r^b_r with
//! b_1 >= ... >= b_r >= 1 on the first r primes.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{FactoredInteger, HighPrecisionReal, Neumaier, PrimeTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct ExponentSignature {
    exponents: Vec<u64>,
}

impl ExponentSignature {
    pub fn one() -> Self {
        ExponentSignature { exponents: Vec::new() }
    }

    /// Validates that `exponents` is nonincreasing with all entries >= 1.
    pub fn new(exponents: Vec<u64>) -> Result<Self> {
        if exponents.contains(&0) {
            return Err(Error::Precondition("signature exponents must be >= 1".into()));
        }
        if exponents.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition("signature must be nonincreasing".into()));
        }
        Ok(ExponentSignature { exponents })
    }

    /// Canonical signature of an exponent multiset: zeros dropped, sorted
    /// nonincreasing.
    pub fn from_multiset<I: IntoIterator<Item = u64>>(exponents: I) -> Self {
        let mut exponents: Vec<u64> = exponents.into_iter().filter(|&e| e > 0).collect();
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        ExponentSignature { exponents }
    }

    pub(crate) fn from_sorted_unchecked(exponents: Vec<u64>) -> Self {
        debug_assert!(exponents.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(exponents.iter().all(|&e| e > 0));
        ExponentSignature { exponents }
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// The factored integer p_1^b_1 ⋯ p_r^b_r.
    pub fn to_factored(&self, table: &PrimeTable) -> Result<FactoredInteger> {
        table.ensure(self.len())?;
        Ok(FactoredInteger::from_sorted_unchecked(
            self.exponents
                .iter()
                .enumerate()
                .map(|(i, &e)| (table.prime(i), e))
                .collect(),
        ))
    }

    /// `Σ b_i ln p_i` in plain double precision.
    pub fn ln(&self, table: &PrimeTable) -> f64 {
        self.exponents
            .iter()
            .zip(table.logs())
            .map(|(&e, &l)| e as f64 * l)
            .collect::<Neumaier>()
            .sum()
    }

    pub fn to_biguint(&self, table: &PrimeTable) -> Result<BigUint> {
        table.ensure(self.len())?;
        let mut acc = BigUint::one();
        for (i, &e) in self.exponents.iter().enumerate() {
            let e = u32::try_from(e).map_err(|_| Error::OutOfRange("exponent".into()))?;
            acc *= BigUint::from(table.prime(i)).pow(e);
        }
        Ok(acc)
    }
}

impl fmt::Display for ExponentSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// `ln n` for the integer denoted by `sig`, with a bound on rounding error.
///
/// The bound covers the relative error of each cached prime log (2^-50),
/// each product `b_i·ln p_i` and the compensated sum.
pub fn log_of_signature(sig: &ExponentSignature, table: &PrimeTable) -> Result<HighPrecisionReal> {
    table.ensure(sig.len())?;
    let value = sig.ln(table);
    let r = sig.len().max(1) as f64;
    let err = value * (2f64.powi(-50) + r * 2f64.powi(-52));
    Ok(HighPrecisionReal::from_f64(value, err))
}

/// Exact comparison of two factored integers.
///
/// Common prime powers are cancelled before anything is materialized, so
/// large but nearly equal values stay cheap to compare.
pub fn compare_factored(a: &FactoredInteger, b: &FactoredInteger) -> Ordering {
    let mut left = BigUint::one();
    let mut right = BigUint::one();
    let (fa, fb) = (a.factors(), b.factors());
    let (mut i, mut j) = (0, 0);
    let push = |acc: &mut BigUint, p: u64, e: u64| {
        *acc *= BigUint::from(p).pow(u32::try_from(e).expect("exponent too large"));
    };
    while i < fa.len() || j < fb.len() {
        match (fa.get(i), fb.get(j)) {
            (Some(&(p, e)), Some(&(q, g))) if p == q => {
                match e.cmp(&g) {
                    Ordering::Greater => push(&mut left, p, e - g),
                    Ordering::Less => push(&mut right, p, g - e),
                    Ordering::Equal => {}
                }
                i += 1;
                j += 1;
            }
            (Some(&(p, e)), Some(&(q, _))) if p < q => {
                push(&mut left, p, e);
                i += 1;
            }
            (Some(&(p, e)), None) => {
                push(&mut left, p, e);
                i += 1;
            }
            (_, Some(&(q, g))) => {
                push(&mut right, q, g);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    left.cmp(&right)
}
