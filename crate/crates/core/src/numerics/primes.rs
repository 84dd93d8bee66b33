//! Prime tables with cached natural logarithms.

use crate::error::{Error, Result};

/// Default upper limit on the number of primes a table may hold.
///
/// 10^7 primes cost roughly 240 MB (prime, log, prefix log sum).
pub const DEFAULT_PRIME_CEILING: usize = 10_000_000;

/// Hard limit accepted by [`PrimeTable::with_ceiling`].
pub const MAX_PRIME_COUNT: usize = 100_000_000;

const SEGMENT: usize = 1 << 18;

/// The first `count` primes, their natural logs and prefix sums of the logs.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    primes: Vec<u64>,
    logs: Vec<f64>,
    // cum_logs[i] = ln p_1 + ... + ln p_i, cum_logs[0] = 0
    cum_logs: Vec<f64>,
}

impl PrimeTable {
    /// Table of the first `count` primes, using [`DEFAULT_PRIME_CEILING`].
    pub fn first(count: usize) -> Result<Self> {
        Self::with_ceiling(count, DEFAULT_PRIME_CEILING)
    }

    pub fn with_ceiling(count: usize, ceiling: usize) -> Result<Self> {
        let ceiling = ceiling.min(MAX_PRIME_COUNT);
        if count == 0 {
            return Err(Error::Precondition("prime count must be at least 1".into()));
        }
        if count > ceiling {
            return Err(Error::Capacity { requested: count, ceiling });
        }
        let primes = sieve_first(count);
        let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        let mut cum_logs = Vec::with_capacity(count + 1);
        let mut acc = Neumaier::default();
        cum_logs.push(0.0);
        for &l in &logs {
            acc.add(l);
            cum_logs.push(acc.sum());
        }
        Ok(PrimeTable { primes, logs, cum_logs })
    }

    /// Smallest table whose log prefix sum exceeds `log_budget`, i.e. every
    /// squarefree product of initial primes that fits the budget fits the table.
    pub fn covering_log_budget(log_budget: f64) -> Result<Self> {
        let mut count = 16usize;
        loop {
            let table = Self::first(count)?;
            if table.total_log() > log_budget {
                return Ok(table);
            }
            count = count.saturating_mul(2);
        }
    }

    pub fn count(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    /// The `i`-th prime, zero based (`prime(0) == 2`).
    pub fn prime(&self, i: usize) -> u64 {
        self.primes[i]
    }

    pub fn log(&self, i: usize) -> f64 {
        self.logs[i]
    }

    /// `ln p_1 + ... + ln p_k` for the first `k` primes.
    pub fn log_prefix(&self, k: usize) -> f64 {
        self.cum_logs[k]
    }

    pub fn total_log(&self) -> f64 {
        self.cum_logs[self.primes.len()]
    }

    pub fn ensure(&self, need: usize) -> Result<()> {
        if need > self.count() {
            Err(Error::TableTooSmall { need, have: self.count() })
        } else {
            Ok(())
        }
    }

    /// Number of primes `<= x` among the table entries.
    pub fn pi(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }
}

/// Upper bound for the `k`-th prime (Rosser: p_k < k(ln k + ln ln k), k >= 6).
fn nth_prime_upper(k: usize) -> u64 {
    if k < 6 {
        return 13;
    }
    let k = k as f64;
    (k * (k.ln() + k.ln().ln())).ceil() as u64 + 1
}

/// Segmented sieve of Eratosthenes over odd numbers returning the first `count` primes.
fn sieve_first(count: usize) -> Vec<u64> {
    let limit = nth_prime_upper(count);
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);

    let mut out = Vec::with_capacity(count);
    out.push(2u64);
    if count == 1 {
        return out;
    }
    // segment covers odd numbers lo, lo+2, ..., one flag per odd number
    let mut flags = vec![true; SEGMENT];
    let mut lo = 3u64;
    while out.len() < count && lo <= limit {
        let span = (SEGMENT as u64).min((limit - lo) / 2 + 1) as usize;
        flags[..span].iter_mut().for_each(|f| *f = true);
        let hi = lo + 2 * span as u64; // exclusive
        for &p in base.iter().skip(1) {
            if p * p >= hi {
                break;
            }
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - lo) / 2) as usize;
            while idx < span {
                flags[idx] = false;
                idx += p as usize;
            }
        }
        for (i, &f) in flags[..span].iter().enumerate() {
            if f {
                out.push(lo + 2 * i as u64);
                if out.len() == count {
                    break;
                }
            }
        }
        lo = hi;
    }
    debug_assert_eq!(out.len(), count);
    out
}

/// All primes `<= n`.
pub(crate) fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut is = vec![true; n + 1];
    is[0] = false;
    is[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn first_five() {
        let t = PrimeTable::first(5).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7, 11]);
        assert_eq!(PrimeTable::first(1).unwrap().primes(), &[2]);
    }

    #[test]
    fn twenty_fifth_prime() {
        let t = PrimeTable::first(25).unwrap();
        assert_eq!(t.prime(24), 97);
    }

    #[test]
    fn primality_up_to_1e5() {
        let t = PrimeTable::first(100_000).unwrap();
        assert_eq!(t.prime(0), 2);
        assert!(t.primes().windows(2).all(|w| w[0] < w[1]));
        assert!(t.primes().iter().all(|&p| is_prime_trial(p)));
        // no primes skipped: compare with a plain sieve up to the last entry
        let plain = simple_sieve(*t.primes().last().unwrap());
        assert_eq!(plain, t.primes());
    }

    #[test]
    fn crosses_segment_boundaries() {
        // p_{10^6} = 15485863
        let t = PrimeTable::first(1_000_000).unwrap();
        assert_eq!(t.prime(999_999), 15_485_863);
    }

    #[test]
    fn logs_accurate() {
        let t = PrimeTable::first(1000).unwrap();
        for (&p, &l) in t.primes().iter().zip(t.logs()) {
            assert!((l - (p as f64).ln()).abs() <= l * 2f64.powi(-50));
        }
        assert!((t.log_prefix(3) - 30f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn capacity_and_zero() {
        assert!(matches!(
            PrimeTable::with_ceiling(11, 10),
            Err(Error::Capacity { requested: 11, ceiling: 10 })
        ));
        assert!(PrimeTable::first(0).is_err());
    }

    #[test]
    fn covering_budget() {
        let t = PrimeTable::covering_log_budget(100.0).unwrap();
        assert!(t.total_log() > 100.0);
    }

    #[test]
    fn pi_counts() {
        let t = PrimeTable::first(100).unwrap();
        assert_eq!(t.pi(1), 0);
        assert_eq!(t.pi(2), 1);
        assert_eq!(t.pi(100), 25);
    }
}
