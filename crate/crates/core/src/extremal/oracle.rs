//! Exact maxima of `ln d(n)`, `ln d(d(n))` and `ω(d(n))` over `n <= x`.
//!
//! Only sorted signatures `β_1 >= β_2 >= ...` on `2, 3, 5, ...` are
//! searched: the three objectives depend on the exponent multiset alone,
//! and sorting the exponents onto the smallest primes never increases `n`.
//!
//! The search is a depth-first walk in lexicographic order (a prefix before
//! its extensions, smaller `β` first) that replaces the incumbent only on a
//! strict improvement, so the reported signature is the lexicographically
//! smallest maximizer.
//!
//! # Pruning bounds
//!
//! At slot `i` (prime `p_i`) with remaining log budget `R` and cap
//! `β_i <= b`, let the rest of the signature be `β_i, β_{i+1}, ...`, so
//! `Σ β_k <= R / ln p_i` and at most `s` slots fit, where `s` is the largest
//! count with `ln p_i + ... + ln p_{i+s-1} <= R`.
//!
//! * `ln d`: the remaining factor `∏(β_k + 1)` satisfies
//!   `ln(β + 1) <= β ln 2`, so the gain is at most `ln 2 · R / ln p_i`,
//!   and at most `s · ln(b + 1)`.
//! * `ln d(d)`: with `D` the current `d(n)` and `M = ∏(β_k + 1)` the rest,
//!   `d(DM) <= d(D) d(M)` and `d(M) <= ∏ d(β_k + 1)`. Since
//!   `d(m) <= m <= 2^(m-1)`, each factor contributes at most `β_k ln 2`, and
//!   at most `max_{β <= b} ln d(β + 1)`; the gain is bounded by both totals.
//! * `ω(d)`: each new prime `q` of `d(n)` divides some `β_k + 1 <= b + 1`,
//!   and distinct new primes in one slot satisfy
//!   `β_k = ∏q - 1 >= Σ(q - 1)`. So the new primes, all absent from `D`,
//!   have `Σ(q - 1) <= R / ln p_i`; the gain is at most the number of the
//!   smallest such primes whose `q - 1` fit that sum.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::{Objective, SearchResult};
use crate::error::{Error, Result};
use crate::numerics::{simple_sieve, ExponentSignature, PrimeTable};

pub const DEFAULT_NODE_LIMIT: u64 = 200_000_000;

/// Above this budget the unpruned cross-check is skipped.
pub const UNPRUNED_CHECK_MAX_LOG: f64 = 18.420680743952367; // ln 10^8

#[derive(Debug, Clone, PartialEq)]
pub enum Budget {
    /// Natural-log budget `ln x`.
    Log(f64),
    /// The integer `x` itself; boundary cases are settled exactly.
    Integer(BigUint),
}

impl Budget {
    pub fn log(&self) -> f64 {
        match self {
            Budget::Log(l) => *l,
            Budget::Integer(x) => ln_biguint(x),
        }
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub node_limit: u64,
    /// Re-run without pruning and compare, for budgets up to `ln 10^8`.
    pub check_unpruned: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { node_limit: DEFAULT_NODE_LIMIT, check_unpruned: false }
    }
}

/// Maximum of `objective` over `n <= e^log_budget`.
pub fn oracle_max(log_budget: f64, objective: Objective, table: &PrimeTable) -> Result<SearchResult> {
    oracle_max_with(&Budget::Log(log_budget), objective, table, OracleOptions::default())
}

/// Maximum of `objective` over `n <= x`, exact at the boundary.
pub fn oracle_max_exact(x: &BigUint, objective: Objective, table: &PrimeTable) -> Result<SearchResult> {
    oracle_max_with(&Budget::Integer(x.clone()), objective, table, OracleOptions::default())
}

pub fn oracle_max_with(
    budget: &Budget,
    objective: Objective,
    table: &PrimeTable,
    opts: OracleOptions,
) -> Result<SearchResult> {
    let log_budget = budget.log();
    if !(log_budget >= 0.0) || !log_budget.is_finite() {
        return Err(Error::Precondition(format!("log budget must be >= 0, got {log_budget}")));
    }
    let tol = 1e-9 * log_budget.max(1.0);
    if table.total_log() <= log_budget + tol {
        return Err(Error::TableTooSmall { need: table.count() + 1, have: table.count() });
    }
    let result = Search::new(budget, log_budget, tol, objective, table, opts.node_limit, true).run()?;
    if opts.check_unpruned && log_budget <= UNPRUNED_CHECK_MAX_LOG {
        let plain = Search::new(budget, log_budget, tol, objective, table, u64::MAX, false).run()?;
        assert_eq!(
            (plain.value, &plain.best_signature),
            (result.value, &result.best_signature),
            "pruned search disagrees with unpruned search"
        );
    }
    Ok(result)
}

struct Search<'a> {
    objective: Objective,
    table: &'a PrimeTable,
    log_budget: f64,
    tol: f64,
    exact: Option<&'a BigUint>,
    prune: bool,
    node_limit: u64,
    nodes: u64,
    aborted: bool,

    /// smallest prime factor of every value up to the largest `β + 1`
    spf: Vec<u32>,
    /// primes up to the largest `β + 1`
    small_primes: Vec<u64>,
    /// `max_{β <= b} ln d(β + 1)`, indexed by `b`
    best_slot_gain: Vec<f64>,

    sig: Vec<u64>,
    /// exponent of each prime in the current `d(n)`, indexed by the prime
    d_exps: Vec<u32>,
    d_value: u128,
    dd_value: u128,
    omega_value: u32,
    near_boundary: bool,

    best_value: u128,
    best_sig: Vec<u64>,
    best_near_boundary: bool,
}

impl<'a> Search<'a> {
    fn new(
        budget: &'a Budget,
        log_budget: f64,
        tol: f64,
        objective: Objective,
        table: &'a PrimeTable,
        node_limit: u64,
        prune: bool,
    ) -> Self {
        let max_beta = ((log_budget + tol) / std::f64::consts::LN_2).floor() as usize;
        let top = max_beta + 2;
        let mut spf = vec![0u32; top + 1];
        for i in 2..=top {
            if spf[i] == 0 {
                for j in (i..=top).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        let mut d_small = vec![0u32; top + 1];
        for m in 1..=top {
            let mut rest = m;
            let mut d = 1u32;
            while rest > 1 {
                let p = spf[rest] as usize;
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                d *= e + 1;
            }
            d_small[m] = d;
        }
        let mut best_slot_gain = vec![0.0f64; max_beta + 1];
        for b in 1..=max_beta {
            best_slot_gain[b] = best_slot_gain[b - 1].max((d_small[b + 1] as f64).ln());
        }
        Search {
            objective,
            table,
            log_budget,
            tol,
            exact: match budget {
                Budget::Integer(x) => Some(x),
                Budget::Log(_) => None,
            },
            prune,
            node_limit,
            nodes: 0,
            aborted: false,
            spf,
            small_primes: simple_sieve(top as u64),
            best_slot_gain,
            sig: Vec::new(),
            d_exps: vec![0; top + 1],
            d_value: 1,
            dd_value: 1,
            omega_value: 0,
            near_boundary: false,
            best_value: 0,
            best_sig: Vec::new(),
            best_near_boundary: false,
        }
    }

    fn run(mut self) -> Result<SearchResult> {
        let cap = self.best_slot_gain.len() as u64 - 1;
        self.best_value = self.current();
        self.dfs(0.0, cap)?;
        let result = SearchResult {
            objective: self.objective,
            best_signature: ExponentSignature::from_sorted_unchecked(self.best_sig),
            value: self.best_value,
            nodes: self.nodes,
            proven_optimal: !self.aborted,
            near_boundary: self.best_near_boundary,
        };
        if self.aborted {
            return Err(Error::Resource { partial: Box::new(result) });
        }
        Ok(result)
    }

    fn current(&self) -> u128 {
        match self.objective {
            Objective::LogD => self.d_value,
            Objective::LogDd => self.dd_value,
            Objective::OmegaD => self.omega_value as u128,
        }
    }

    fn dfs(&mut self, cost: f64, cap: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.aborted = true;
            return Ok(());
        }
        let value = self.current();
        if value > self.best_value {
            self.best_value = value;
            self.best_sig.clone_from(&self.sig);
            self.best_near_boundary = self.near_boundary;
        }
        let i = self.sig.len();
        let remaining = self.log_budget - cost;
        let ln_p = self.table.log(i);
        if remaining + self.tol < ln_p {
            return Ok(());
        }
        if self.prune && !self.may_improve(i, remaining, cap) {
            return Ok(());
        }
        for beta in 1..=cap {
            let new_cost = cost + beta as f64 * ln_p;
            if new_cost > self.log_budget + self.tol {
                break;
            }
            let boundary = new_cost > self.log_budget - self.tol;
            if boundary && self.exact.is_some() && !self.fits_exactly(beta)? {
                break;
            }
            let saved_flag = self.near_boundary;
            self.near_boundary |= boundary && self.exact.is_none();
            self.push(beta)?;
            self.dfs(new_cost, beta)?;
            self.pop(beta);
            self.near_boundary = saved_flag;
            if self.aborted {
                return Ok(());
            }
        }
        Ok(())
    }

    fn fits_exactly(&self, beta: u64) -> Result<bool> {
        let mut sig = self.sig.clone();
        sig.push(beta);
        let n = ExponentSignature::from_sorted_unchecked(sig).to_biguint(self.table)?;
        Ok(&n <= self.exact.expect("exact budget"))
    }

    /// Whether the subtree below the current node can beat the incumbent.
    fn may_improve(&self, i: usize, remaining: f64, cap: u64) -> bool {
        let ln_p = self.table.log(i);
        let weight = (remaining + self.tol) / ln_p;
        match self.objective {
            Objective::OmegaD => {
                let gain = self.omega_gain_bound(weight, cap);
                self.omega_value as u128 + gain > self.best_value
            }
            Objective::LogD | Objective::LogDd => {
                let slots = self.slots_that_fit(i, remaining + self.tol) as f64;
                let per_slot = match self.objective {
                    Objective::LogD => ((cap + 1) as f64).ln(),
                    _ => self.best_slot_gain[cap as usize],
                };
                let gain = (std::f64::consts::LN_2 * weight).min(slots * per_slot);
                let now = (self.current() as f64).ln();
                // any strict improvement reaches at least best + 1
                now + gain >= ((self.best_value + 1) as f64).ln() - 1e-9
            }
        }
    }

    fn slots_that_fit(&self, i: usize, remaining: f64) -> usize {
        let base = self.table.log_prefix(i);
        let count = self.table.count();
        // largest s with prefix(i + s) - prefix(i) <= remaining
        let (mut lo, mut hi) = (0usize, count - i);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.table.log_prefix(i + mid) - base <= remaining {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    fn omega_gain_bound(&self, weight: f64, cap: u64) -> u128 {
        let mut spent = 0.0;
        let mut gain = 0u128;
        for &q in &self.small_primes {
            if q > cap + 1 {
                break;
            }
            if self.d_exps[q as usize] > 0 {
                continue;
            }
            spent += (q - 1) as f64;
            if spent > weight {
                break;
            }
            gain += 1;
        }
        gain
    }

    fn push(&mut self, beta: u64) -> Result<()> {
        self.sig.push(beta);
        match self.objective {
            Objective::LogD => {
                self.d_value = self.d_value.checked_mul(beta as u128 + 1).ok_or_else(|| {
                    Error::OutOfRange("d(n) exceeds 128 bits at this budget".into())
                })?;
            }
            Objective::LogDd | Objective::OmegaD => {
                let mut rest = beta as usize + 1;
                while rest > 1 {
                    let q = self.spf[rest] as usize;
                    let mut k = 0u32;
                    while rest.is_multiple_of(q) {
                        rest /= q;
                        k += 1;
                    }
                    let e = self.d_exps[q];
                    if e == 0 {
                        self.omega_value += 1;
                    }
                    self.d_exps[q] = e + k;
                    self.dd_value = self.dd_value / (e as u128 + 1) * (e + k + 1) as u128;
                }
            }
        }
        Ok(())
    }

    fn pop(&mut self, beta: u64) {
        self.sig.pop();
        match self.objective {
            Objective::LogD => self.d_value /= beta as u128 + 1,
            Objective::LogDd | Objective::OmegaD => {
                let mut rest = beta as usize + 1;
                while rest > 1 {
                    let q = self.spf[rest] as usize;
                    let mut k = 0u32;
                    while rest.is_multiple_of(q) {
                        rest /= q;
                        k += 1;
                    }
                    let e = self.d_exps[q];
                    self.d_exps[q] = e - k;
                    if e == k {
                        self.omega_value -= 1;
                    }
                    self.dd_value = self.dd_value / (e as u128 + 1) * (e - k + 1) as u128;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor;

    fn table() -> PrimeTable {
        PrimeTable::first(1000).unwrap()
    }

    /// Objective of every n <= x by direct factorization.
    fn brute(x: u64, objective: Objective) -> u128 {
        (1..=x)
            .map(|n| {
                let f = crate::numerics::factor_small(n).unwrap();
                let sig = ExponentSignature::from_multiset(f.exponents());
                match objective {
                    Objective::LogD => divisor::d_exact(&sig).to_u128().unwrap(),
                    Objective::LogDd => divisor::dd_exact(&sig).to_u128().unwrap(),
                    Objective::OmegaD => divisor::omega_d(&sig) as u128,
                }
            })
            .max()
            .unwrap()
    }

    #[test]
    fn examples() {
        let t = table();
        let r = oracle_max(100f64.ln(), Objective::LogDd, &t).unwrap();
        assert_eq!(r.value, 6);
        assert_eq!(r.best_signature.exponents(), &[2, 1, 1]);
        assert!(r.proven_optimal);
        assert_eq!(oracle_max(100f64.ln(), Objective::OmegaD, &t).unwrap().value, 2);
        let r = oracle_max_exact(&BigUint::from(720u32), Objective::OmegaD, &t).unwrap();
        assert_eq!(r.value, 3);
        for obj in [Objective::LogD, Objective::LogDd, Objective::OmegaD] {
            let r = oracle_max(0.0, obj, &t).unwrap();
            assert_eq!(r.value, if obj == Objective::OmegaD { 0 } else { 1 });
            assert!(r.best_signature.is_empty());
        }
    }

    #[test]
    fn exact_budget_boundary() {
        let t = table();
        // n = 12 has d = 6; x = 12 must include it, x = 11 must not
        let at = oracle_max_exact(&BigUint::from(12u32), Objective::LogD, &t).unwrap();
        assert_eq!(at.value, 6);
        assert!(!at.near_boundary);
        let below = oracle_max_exact(&BigUint::from(11u32), Objective::LogD, &t).unwrap();
        assert_eq!(below.value, 4);
        let flagged = oracle_max(12f64.ln(), Objective::LogD, &t).unwrap();
        assert_eq!(flagged.value, 6);
        assert!(flagged.near_boundary);
    }

    #[test]
    fn matches_brute_force_small() {
        let t = table();
        for x in [1u64, 2, 3, 7, 12, 30, 60, 100, 360, 1000, 5040, 20_000] {
            for obj in [Objective::LogD, Objective::LogDd, Objective::OmegaD] {
                let r = oracle_max_exact(&BigUint::from(x), obj, &t).unwrap();
                assert_eq!(r.value, brute(x, obj), "x = {x}, {obj:?}");
            }
        }
    }

    #[test]
    fn result_is_consistent() {
        let t = table();
        for obj in [Objective::LogD, Objective::LogDd, Objective::OmegaD] {
            let r = oracle_max(1e6f64.ln(), obj, &t).unwrap();
            let sig = &r.best_signature;
            let recomputed = match obj {
                Objective::LogD => divisor::d_exact(sig).to_u128().unwrap(),
                Objective::LogDd => divisor::dd_exact(sig).to_u128().unwrap(),
                Objective::OmegaD => divisor::omega_d(sig) as u128,
            };
            assert_eq!(recomputed, r.value);
            assert!(sig.ln(&t) <= 1e6f64.ln() + 1e-9);
        }
    }

    #[test]
    fn unpruned_agrees() {
        let t = table();
        let opts = OracleOptions { check_unpruned: true, ..Default::default() };
        for k in [2.0, 4.0, 6.0, 8.0] {
            for obj in [Objective::LogD, Objective::LogDd, Objective::OmegaD] {
                oracle_max_with(&Budget::Log(k * 10f64.ln()), obj, &t, opts).unwrap();
            }
        }
    }

    #[test]
    fn node_limit_returns_partial() {
        let t = table();
        let opts = OracleOptions { node_limit: 10, check_unpruned: false };
        match oracle_max_with(&Budget::Log(40.0), Objective::LogDd, &t, opts) {
            Err(Error::Resource { partial }) => {
                assert!(!partial.proven_optimal);
                assert_eq!(partial.nodes, 11);
            }
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        let t = table();
        assert!(oracle_max(-1.0, Objective::LogD, &t).is_err());
        let tiny = PrimeTable::first(3).unwrap();
        assert!(matches!(
            oracle_max(100.0, Objective::LogD, &tiny),
            Err(Error::TableTooSmall { .. })
        ));
    }

    #[test]
    fn lexicographically_smallest_tie() {
        // (1), (1,1), (1,1,1), (2) all have ω(d) = 1; (2,1) = 12 is the
        // first with ω(d) = 2, ahead of (2,1,1) = 60 and (3,1) = 24
        let t = table();
        let r = oracle_max(100f64.ln(), Objective::OmegaD, &t).unwrap();
        assert_eq!(r.best_signature.exponents(), &[2, 1]);
    }
}
