//! The smallest integer with exactly `N` divisors.
//!
//! Every `m` with `d(m) = N` corresponds to a multiplicative partition
//! `N = f_1 ⋯ f_r`; the cheapest way to realise a partition is
//! `p_1^(f_1-1) ⋯ p_r^(f_r-1)` with `f_1 >= ... >= f_r` (rearrangement), so
//! `m_N` is a minimum over partitions. The solver walks partitions depth
//! first with a cost bound, optionally skipping branches that break the
//! structure every minimizer must have (see [`check_lemma1_structure`]).

use std::cmp::Ordering;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::divisor::big_omega;
use crate::error::{Error, Result};
use crate::numerics::{
    compare_factored, factor_small, simple_sieve, FactoredInteger, PrimeTable,
};

/// Largest `N` accepted by the partition enumerator and the solver.
pub const MAX_N: u64 = 1_000_000_000_000;

/// Largest scan bound accepted by the brute-force oracle.
pub const MAX_BRUTE_BOUND: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplicativePartition {
    factors: Vec<u64>,
}

impl MultiplicativePartition {
    /// Nonincreasing parts, each at least 2.
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn product(&self) -> u64 {
        self.factors.iter().product()
    }
}

/// Divisors of `n` that are at least 2, in decreasing order.
fn divisors_desc(n: u64) -> Result<Vec<u64>> {
    let f = factor_small(n)?;
    let mut divs = vec![1u64];
    for &(p, e) in f.factors() {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.retain(|&d| d >= 2);
    divs.sort_unstable_by(|a, b| b.cmp(a));
    Ok(divs)
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::OutOfRange(format!("N = {n} outside 1..={MAX_N}")));
    }
    Ok(())
}

/// Streams every multiplicative partition of `n` exactly once, in
/// decreasing lexicographic order. `n = 1` yields the empty partition.
pub fn multiplicative_partitions(n: u64) -> Result<MultiplicativePartitions> {
    check_n(n)?;
    let divs = divisors_desc(n)?;
    let start = first_at_most(&divs, n);
    Ok(MultiplicativePartitions { divs, parts: Vec::new(), stack: vec![(n, start)] })
}

/// Index of the first divisor `<= limit` in a decreasing list.
fn first_at_most(divs: &[u64], limit: u64) -> usize {
    divs.partition_point(|&d| d > limit)
}

#[derive(Debug, Clone)]
pub struct MultiplicativePartitions {
    divs: Vec<u64>,
    parts: Vec<u64>,
    // (remaining cofactor, next divisor index to try)
    stack: Vec<(u64, usize)>,
}

impl Iterator for MultiplicativePartitions {
    type Item = MultiplicativePartition;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let &mut (rem, ref mut pos) = self.stack.last_mut()?;
            if rem == 1 {
                let out = MultiplicativePartition { factors: self.parts.clone() };
                self.stack.pop();
                self.parts.pop();
                return Some(out);
            }
            let mut chosen = None;
            while *pos < self.divs.len() {
                let d = self.divs[*pos];
                *pos += 1;
                if rem % d == 0 {
                    chosen = Some(d);
                    break;
                }
            }
            match chosen {
                Some(d) => {
                    let rest = rem / d;
                    let start = first_at_most(&self.divs, d.min(rest));
                    self.parts.push(d);
                    self.stack.push((rest, start));
                }
                None => {
                    self.stack.pop();
                    self.parts.pop();
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MnOptions {
    /// Skip partitions that cannot satisfy the prime-power structure of a
    /// minimizer. Sound, and much faster; disable to cross-check.
    pub structural_pruning: bool,
}

impl Default for MnOptions {
    fn default() -> Self {
        MnOptions { structural_pruning: true }
    }
}

/// `m_N`, the smallest positive integer with exactly `N` divisors.
pub fn min_with_divisor_count(n: u64, table: &PrimeTable) -> Result<FactoredInteger> {
    min_with_divisor_count_opts(n, table, MnOptions::default())
}

pub fn min_with_divisor_count_opts(
    n: u64,
    table: &PrimeTable,
    opts: MnOptions,
) -> Result<FactoredInteger> {
    check_n(n)?;
    let omega_n = big_omega(&factor_small(n)?) as usize;
    table.ensure(omega_n)?;
    if n == 1 {
        return Ok(FactoredInteger::one());
    }
    let divs = divisors_desc(n)?;
    let info: Vec<DivInfo> = divs
        .iter()
        .map(|&d| {
            let f = factor_small(d).expect("divisor in range");
            DivInfo {
                big_omega: big_omega(&f) as u32,
                largest_prime: f.factors().last().map_or(1, |&(p, _)| p),
            }
        })
        .collect();
    let mut search = MnSearch { divs: &divs, info: &info, table, opts, best: None };
    let mut parts = Vec::with_capacity(omega_n);
    search.dfs(n, n, 0.0, &mut parts);
    let (_, best) = search.best.expect("the partition (N) always exists");
    Ok(partition_to_integer(&best, table))
}

struct DivInfo {
    big_omega: u32,
    largest_prime: u64,
}

struct MnSearch<'a> {
    divs: &'a [u64],
    info: &'a [DivInfo],
    table: &'a PrimeTable,
    opts: MnOptions,
    best: Option<(f64, Vec<u64>)>,
}

/// Logs closer than this (relative) are compared exactly.
const TIE_TOLERANCE: f64 = 1e-9;

fn tolerance(cost: f64) -> f64 {
    TIE_TOLERANCE * cost.abs().max(1.0)
}

fn partition_to_integer(parts: &[u64], table: &PrimeTable) -> FactoredInteger {
    FactoredInteger::from_sorted_unchecked(
        parts
            .iter()
            .enumerate()
            .map(|(i, &f)| (table.prime(i), f - 1))
            .collect(),
    )
}

impl MnSearch<'_> {
    fn index_of(&self, d: u64) -> usize {
        self.divs
            .binary_search_by(|probe| d.cmp(probe))
            .expect("cofactor is a divisor of N")
    }

    fn dfs(&mut self, rem: u64, cap: u64, cost: f64, parts: &mut Vec<u64>) {
        let depth = parts.len();
        if rem == 1 {
            self.offer(cost, parts);
            return;
        }
        // every remaining part f costs (f-1) ln p with p >= p_depth, and
        // Σ (f-1) >= Σ log2 f = log2 rem
        if let Some((best, _)) = &self.best {
            let lower = cost + (rem as f64).log2() * self.table.log(depth);
            if lower > best + tolerance(*best) {
                return;
            }
        }
        let start = first_at_most(self.divs, cap.min(rem));
        for idx in start..self.divs.len() {
            let d = self.divs[idx];
            if !rem.is_multiple_of(d) {
                continue;
            }
            let rest = rem / d;
            if rest > 1 && self.info[self.index_of(rest)].largest_prime > d {
                continue;
            }
            if self.opts.structural_pruning && self.breaks_structure(d, rest, depth) {
                continue;
            }
            let step = (d - 1) as f64 * self.table.log(depth);
            parts.push(d);
            self.dfs(rest, d, cost + step, parts);
            parts.pop();
        }
    }

    /// Part `d` at prime slot `depth` (zero based). The final length is at
    /// most `r = depth + 1 + Ω(rest)`. If `Ω(d) > k` and `p^(2^k) > p_{r+1}`,
    /// then exponent `d - 1` could be split as `(a-1, b-1)` across this slot
    /// and slot `r + 1` at lower cost, so no minimizer looks like this.
    fn breaks_structure(&self, d: u64, rest: u64, depth: usize) -> bool {
        let k = self.info[self.index_of(d)].big_omega;
        if k < 2 {
            return false;
        }
        let rest_omega = if rest == 1 { 0 } else { self.info[self.index_of(rest)].big_omega };
        let r_max = depth + 1 + rest_omega as usize;
        if r_max >= self.table.count() {
            return false;
        }
        let p = self.table.prime(depth);
        let next = self.table.prime(r_max);
        pow_exceeds(p, 1u64 << (k - 1).min(63), next)
    }

    fn offer(&mut self, cost: f64, parts: &[u64]) {
        let better = match &self.best {
            None => true,
            Some((best, best_parts)) => {
                if cost < best - tolerance(*best) {
                    true
                } else if cost > best + tolerance(*best) {
                    false
                } else {
                    let a = partition_to_integer(parts, self.table);
                    let b = partition_to_integer(best_parts, self.table);
                    compare_factored(&a, &b) == Ordering::Less
                }
            }
        };
        if better {
            self.best = Some((cost, parts.to_vec()));
        }
    }
}

/// `base^exp > limit`, without overflow.
fn pow_exceeds(base: u64, exp: u64, limit: u64) -> bool {
    if base <= 1 {
        return base > limit;
    }
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc *= base as u128;
        if acc > limit as u128 {
            return true;
        }
    }
    false
}

/// Smallest `m <= bound` with `d(m) = n` by direct scan, or `None`.
pub fn brute_force_mn(n: u64, bound: u64) -> Result<Option<u64>> {
    if bound > MAX_BRUTE_BOUND {
        return Err(Error::OutOfRange(format!("bound {bound} above {MAX_BRUTE_BOUND}")));
    }
    let mut found = None;
    scan_divisor_counts(bound, |m, d| {
        if u64::from(d) == n {
            found = Some(m);
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// First `m <= bound` with `d(m) = N` for every `N <= max_n`, in one scan.
/// Index 0 is unused.
pub fn brute_force_mn_table(max_n: u32, bound: u64) -> Result<Vec<Option<u64>>> {
    if bound > MAX_BRUTE_BOUND {
        return Err(Error::OutOfRange(format!("bound {bound} above {MAX_BRUTE_BOUND}")));
    }
    let mut first = vec![None; max_n as usize + 1];
    let mut missing = max_n as usize;
    scan_divisor_counts(bound, |m, d| {
        if d <= max_n && first[d as usize].is_none() {
            first[d as usize] = Some(m);
            missing -= 1;
        }
        missing > 0
    });
    Ok(first)
}

const SCAN_SEGMENT: usize = 1 << 15;

/// Calls `visit(m, d(m))` for `m = 1, 2, ..., bound` until it returns false.
///
/// Segmented sieve: every prime `p <= sqrt(bound)` marks its multiples,
/// the product of the prime powers found so far is kept per entry, and a
/// leftover cofactor above `sqrt(bound)` is a single prime.
pub fn scan_divisor_counts<F: FnMut(u64, u32) -> bool>(bound: u64, mut visit: F) {
    if bound == 0 {
        return;
    }
    let root = (bound as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);
    let mut d = vec![0u32; SCAN_SEGMENT];
    let mut found = vec![0u64; SCAN_SEGMENT];
    let mut lo = 1u64;
    while lo <= bound {
        let hi = (lo + SCAN_SEGMENT as u64).min(bound + 1);
        let len = (hi - lo) as usize;
        d[..len].fill(1);
        found[..len].fill(1);
        for &p in &base {
            if p * p >= hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut i = (first - lo) as usize;
            while i < len {
                d[i] *= 2;
                found[i] *= p;
                i += p as usize;
            }
            let mut pk = p * p;
            let mut k = 1u32;
            while pk < hi {
                let first = lo.div_ceil(pk) * pk;
                let mut i = (first - lo) as usize;
                while i < len {
                    d[i] = d[i] / (k + 1) * (k + 2);
                    found[i] *= p;
                    i += pk as usize;
                }
                k += 1;
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }
        for i in 0..len {
            let m = lo + i as u64;
            let count = if found[i] == m { d[i] } else { d[i] * 2 };
            if !visit(m, count) {
                return;
            }
        }
        lo = hi;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureRule {
    /// exponents must be nonincreasing
    Ordered,
    /// `p_j > p_{r+1}^(1/2^k)` forces `Ω(α_j + 1) <= k`
    PrimePowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureViolation {
    pub rule: StructureRule,
    /// one-based prime slot
    pub j: usize,
    /// zero for [`StructureRule::Ordered`]
    pub k: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub violations: Vec<StructureViolation>,
    /// Number of (j, k) pairs tested for the prime-power rule.
    pub checks: usize,
}

impl StructureReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the structure every `m_N = p_1^α_1 ⋯ p_r^α_r` has:
/// `α_1 >= ... >= α_r`, and for each `k >= 1`, `p_j > p_{r+1}^(1/2^k)`
/// implies `Ω(α_j + 1) <= k`.
pub fn check_lemma1_structure(m: &FactoredInteger, table: &PrimeTable) -> Result<StructureReport> {
    let r = m.omega();
    table.ensure(r + 1)?;
    for (i, &(p, _)) in m.factors().iter().enumerate() {
        if p != table.prime(i) {
            return Err(Error::Precondition(format!(
                "support is not an initial segment of the primes: slot {} holds {p}",
                i + 1
            )));
        }
    }
    let alphas: Vec<u64> = m.exponents().collect();
    let mut report = StructureReport::default();
    for j in 1..r {
        if alphas[j - 1] < alphas[j] {
            report.violations.push(StructureViolation { rule: StructureRule::Ordered, j: j + 1, k: 0 });
        }
    }
    let next = table.prime(r);
    let mut k = 1u32;
    // p_{r+1}^(1/2^k) >= 2  <=>  p_{r+1} >= 2^(2^k)
    while k < 7 && !pow_exceeds(2, 1u64 << k, next) {
        for (idx, &alpha) in alphas.iter().enumerate() {
            let p = table.prime(idx);
            // p > next^(1/2^k)  <=>  p^(2^k) > next
            if pow_exceeds(p, 1u64 << k, next) {
                report.checks += 1;
                if big_omega(&factor_small(alpha + 1)?) > u64::from(k) {
                    report.violations.push(StructureViolation {
                        rule: StructureRule::PrimePowerBound,
                        j: idx + 1,
                        k,
                    });
                }
            }
        }
        k += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityReport {
    pub n: u64,
    pub divisors_checked: usize,
    /// Divisors `N'` with `m_{N'} > m_N`.
    pub failures: Vec<u64>,
}

impl DivisibilityReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `m_{N'} <= m_N` for every divisor `N'` of `N` (exact comparison).
pub fn check_lemma1_divisibility(n: u64, table: &PrimeTable) -> Result<DivisibilityReport> {
    check_lemma1_divisibility_with(n, |k| min_with_divisor_count(k, table))
}

/// As [`check_lemma1_divisibility`], taking `m_k` from `mn`.
pub fn check_lemma1_divisibility_with<F>(n: u64, mut mn: F) -> Result<DivisibilityReport>
where
    F: FnMut(u64) -> Result<FactoredInteger>,
{
    if n == 0 || n > 1_000_000 {
        return Err(Error::OutOfRange(format!("N = {n} outside 1..=10^6")));
    }
    let top = mn(n)?;
    let mut divisors = divisors_desc(n)?;
    divisors.push(1);
    let mut failures = Vec::new();
    for &k in &divisors {
        if compare_factored(&mn(k)?, &top) == Ordering::Greater {
            failures.push(k);
        }
    }
    Ok(DivisibilityReport { n, divisors_checked: divisors.len(), failures })
}

/// `m` as a decimal integer.
pub fn to_decimal(m: &FactoredInteger) -> BigUint {
    m.to_biguint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::first(200).unwrap()
    }

    fn parts(n: u64) -> Vec<Vec<u64>> {
        multiplicative_partitions(n).unwrap().map(|p| p.factors().to_vec()).collect()
    }

    fn value(m: &FactoredInteger) -> u128 {
        m.to_u128().unwrap()
    }

    #[test]
    fn partitions_small() {
        assert_eq!(parts(12), vec![vec![12], vec![6, 2], vec![4, 3], vec![3, 2, 2]]);
        assert_eq!(parts(1), vec![Vec::<u64>::new()]);
        assert_eq!(parts(4), vec![vec![4], vec![2, 2]]);
        assert_eq!(parts(7), vec![vec![7]]);
        assert!(multiplicative_partitions(0).is_err());
        assert!(multiplicative_partitions(MAX_N + 1).is_err());
    }

    /// Independent count: number of multisets of parts >= 2 with product n,
    /// by the standard recursion over the smallest allowed part.
    fn count_partitions(n: u64, min_part: u64) -> usize {
        if n == 1 {
            return 1;
        }
        (min_part..=n)
            .filter(|d| n.is_multiple_of(*d))
            .map(|d| count_partitions(n / d, d))
            .sum()
    }

    #[test]
    fn partitions_unique_and_complete() {
        for n in 1..=400u64 {
            let ps = parts(n);
            assert_eq!(ps.len(), count_partitions(n, 2), "N = {n}");
            let mut seen = std::collections::HashSet::new();
            for p in &ps {
                assert!(p.windows(2).all(|w| w[0] >= w[1]));
                assert!(p.iter().all(|&f| f >= 2));
                assert_eq!(p.iter().product::<u64>(), n);
                assert!(seen.insert(p.clone()));
            }
        }
    }

    #[test]
    fn mn_examples() {
        let t = table();
        assert!(min_with_divisor_count(1, &t).unwrap().is_one());
        assert_eq!(value(&min_with_divisor_count(8, &t).unwrap()), 24);
        assert_eq!(value(&min_with_divisor_count(16, &t).unwrap()), 120);
        assert_eq!(value(&min_with_divisor_count(5, &t).unwrap()), 16);
        assert_eq!(min_with_divisor_count(16, &t).unwrap().to_string(), "2^3·3·5");
        assert_eq!(value(&min_with_divisor_count(12, &t).unwrap()), 60);
    }

    #[test]
    fn mn_table_too_small() {
        let t = PrimeTable::first(3).unwrap();
        assert!(matches!(
            min_with_divisor_count(16, &t),
            Err(Error::TableTooSmall { need: 4, have: 3 })
        ));
    }

    #[test]
    fn mn_large_prime_power_n() {
        // N prime forces 2^(N-1)
        let t = table();
        let m = min_with_divisor_count(1_000_000_007, &t).unwrap();
        assert_eq!(m.factors(), &[(2, 1_000_000_006)]);
    }

    #[test]
    fn pruning_does_not_change_results() {
        let t = table();
        let plain = MnOptions { structural_pruning: false };
        for n in (1..=3000u64).chain([5040, 10080, 45360, 720720]) {
            let a = min_with_divisor_count(n, &t).unwrap();
            let b = min_with_divisor_count_opts(n, &t, plain).unwrap();
            assert_eq!(a, b, "N = {n}");
        }
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_mn(6, 100).unwrap(), Some(12));
        assert_eq!(brute_force_mn(2, 10).unwrap(), Some(2));
        assert_eq!(brute_force_mn(7, 100).unwrap(), Some(64));
        assert_eq!(brute_force_mn(11, 1000).unwrap(), None);
        assert!(brute_force_mn(2, MAX_BRUTE_BOUND + 1).is_err());
    }

    #[test]
    fn scan_matches_factorization() {
        let mut checked = 0;
        scan_divisor_counts(300_000, |m, d| {
            let f = factor_small(m).unwrap();
            let expect: u64 = f.exponents().map(|e| e + 1).product();
            assert_eq!(u64::from(d), expect, "m = {m}");
            checked += 1;
            true
        });
        assert_eq!(checked, 300_000);
    }

    #[test]
    fn solver_matches_brute_force() {
        let t = table();
        let brute = brute_force_mn_table(200, 10_000_000).unwrap();
        let mut compared = 0;
        for n in 1..=200u64 {
            if let Some(m) = brute[n as usize] {
                let solved = min_with_divisor_count(n, &t).unwrap();
                assert_eq!(value(&solved), m as u128, "N = {n}");
                compared += 1;
            }
        }
        assert!(compared > 100);
    }

    #[test]
    fn structure_examples() {
        let t = table();
        let m16 = min_with_divisor_count(16, &t).unwrap();
        let report = check_lemma1_structure(&m16, &t).unwrap();
        assert!(report.passes());
        assert!(report.checks >= 2);

        let bad = FactoredInteger::from_pairs([(2, 1), (3, 2)]).unwrap();
        let report = check_lemma1_structure(&bad, &t).unwrap();
        assert_eq!(
            report.violations[0],
            StructureViolation { rule: StructureRule::Ordered, j: 2, k: 0 }
        );

        assert!(check_lemma1_structure(&FactoredInteger::one(), &t).unwrap().passes());

        let gap = FactoredInteger::from_pairs([(2, 3), (5, 1)]).unwrap();
        assert!(matches!(check_lemma1_structure(&gap, &t), Err(Error::Precondition(_))));
    }

    #[test]
    fn prime_power_rule_detects_violation() {
        // 2^3·3^3·5^3·7^3: slot 4 has α+1 = 4 = 2·2 with p_4 = 7 > sqrt(p_5 = 11)
        let t = table();
        let m = FactoredInteger::from_pairs([(2, 3), (3, 3), (5, 3), (7, 3)]).unwrap();
        let report = check_lemma1_structure(&m, &t).unwrap();
        assert!(report.violations.iter().any(|v| v.rule == StructureRule::PrimePowerBound && v.j == 4 && v.k == 1));
    }

    #[test]
    fn divisibility_examples() {
        let t = table();
        for n in [12u64, 16, 13, 1, 720] {
            let r = check_lemma1_divisibility(n, &t).unwrap();
            assert!(r.passes(), "N = {n}");
        }
        assert_eq!(check_lemma1_divisibility(12, &t).unwrap().divisors_checked, 6);
        assert_eq!(check_lemma1_divisibility(13, &t).unwrap().divisors_checked, 2);
    }
}
