//! Executable checks of the quantitative lemmas.
//!
//! Every check works in the log domain with compensated sums. A verdict
//! closer to equality than `1e-9` (relative) is re-evaluated with 256-bit
//! fixed-point arithmetic before it is reported, so rounding can never
//! produce a false violation.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constant::{c_high_precision, c_value};
use crate::error::{Error, Result};
use crate::extremal::{block_widths, floor_log_ratio};
use crate::numerics::{Fixed, FactoredInteger, Neumaier, PrimeTable};

const NEAR: f64 = 1e-9;
const HP_BITS: u32 = 256;

fn c_fixed() -> &'static Fixed {
    static C: OnceLock<Fixed> = OnceLock::new();
    C.get_or_init(|| c_high_precision(HP_BITS).value().clone())
}

fn near(lhs: f64, rhs: f64) -> bool {
    (lhs - rhs).abs() <= NEAR * lhs.abs().max(rhs.abs()).max(1.0)
}

/// Outcome of one inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs` (for checks done on logs, the ratio of the underlying
    /// quantities).
    pub ratio: f64,
}

fn sum_ln_plus_one(a: &[u64]) -> f64 {
    a.iter().map(|&x| ((x + 1) as f64).ln()).collect::<Neumaier>().sum()
}

fn sum_i_ai(a: &[u64]) -> u128 {
    a.iter().enumerate().map(|(i, &x)| (i as u128 + 1) * x as u128).sum()
}

fn fixed_sum_ln_plus_one(a: &[u64]) -> Fixed {
    a.iter().fold(Fixed::zero(HP_BITS), |acc, &x| &acc + &Fixed::ln_u64(x + 1, HP_BITS))
}

fn positive_entries(a: &[u64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Precondition("sequence must be nonempty".into()));
    }
    if a.contains(&0) {
        return Err(Error::Precondition("entries must be positive".into()));
    }
    Ok(())
}

/// `Σ ln(a_i + 1) <= (c/2)·(Σ i·a_i)^(1/2)` on the nonincreasing
/// rearrangement of `a`, which minimizes the right side.
pub fn check_lemma3a(a: &[u64]) -> Result<Verdict> {
    positive_entries(a)?;
    let mut sorted = a.to_vec();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    Ok(lemma3a_verdict(&sorted))
}

/// [`check_lemma3a`] without sorting; a weaker form, for inspection.
pub fn check_lemma3a_as_given(a: &[u64]) -> Result<Verdict> {
    positive_entries(a)?;
    Ok(lemma3a_verdict(a))
}

fn lemma3a_verdict(a: &[u64]) -> Verdict {
    lemma3a_from_sums(sum_ln_plus_one(a), sum_i_ai(a), || fixed_sum_ln_plus_one(a))
}

fn lemma3a_from_sums<F: FnOnce() -> Fixed>(lhs: f64, weight: u128, exact_lhs: F) -> Verdict {
    let rhs = c_value() / 2.0 * (weight as f64).sqrt();
    let mut holds = lhs <= rhs;
    if near(lhs, rhs) {
        // lhs^2 <= c^2 weight / 4
        let l = exact_lhs();
        let c = c_fixed();
        let right = (c * c).mul_int(weight as i64).div_int(4);
        holds = &l * &l <= right;
    }
    Verdict { holds, lhs, rhs, ratio: lhs / rhs }
}

/// `Σ ln(a_i + 1) <= ((1 + ln²(A+1))/A · Σ i·a_i)^(1/2)` when every
/// `a_i >= A`; checked on the nonincreasing rearrangement.
///
/// This is the inequality as usually printed. It fails for long constant
/// runs such as `(4, 4, 4)` with `A = 4`; see [`check_lemma3b_doubled`].
pub fn check_lemma3b(a: &[u64], big_a: u64) -> Result<Verdict> {
    lemma3b_with_factor(a, big_a, 1)
}

/// The same inequality with `2·Σ i·a_i` under the root. Cauchy-Schwarz
/// gives the bound with `Σ_j y_j²`, where `y_j = #{i : a_i >= j}`, and
/// `Σ_j y_j² <= 2 Σ i·a_i`; the factor 2 is needed.
pub fn check_lemma3b_doubled(a: &[u64], big_a: u64) -> Result<Verdict> {
    lemma3b_with_factor(a, big_a, 2)
}

fn lemma3b_with_factor(a: &[u64], big_a: u64, factor: u128) -> Result<Verdict> {
    positive_entries(a)?;
    if big_a == 0 {
        return Err(Error::Precondition("A must be positive".into()));
    }
    if let Some(&low) = a.iter().find(|&&x| x < big_a) {
        return Err(Error::Precondition(format!("entry {low} is below A = {big_a}")));
    }
    let mut sorted = a.to_vec();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    let lhs = sum_ln_plus_one(&sorted);
    let weight = factor * sum_i_ai(&sorted);
    let la = ((big_a + 1) as f64).ln();
    let rhs = ((1.0 + la * la) / big_a as f64 * weight as f64).sqrt();
    let mut holds = lhs <= rhs;
    if near(lhs, rhs) {
        // A·lhs^2 <= (1 + ln²(A+1))·weight
        let l = fixed_sum_ln_plus_one(&sorted);
        let la = Fixed::ln_u64(big_a + 1, HP_BITS);
        let one = Fixed::from_int(1, HP_BITS);
        let left = (&l * &l).mul_int(big_a as i64);
        let right = (&one + &(&la * &la)).mul_int(weight as i64);
        holds = left <= right;
    }
    Ok(Verdict { holds, lhs, rhs, ratio: lhs / rhs })
}

fn prime_count(s: u64) -> u64 {
    (2..=s).filter(|&k| crate::numerics::is_prime_u64(k)).count() as u64
}

/// The explicit bound `d(n) <= (2 ln n / s)^s · (ln s)^(π(s) - s) / ln 2`
/// with `s = ω(n) >= 2`, compared on logs. `lhs` and `rhs` are the logs.
pub fn check_lemma2_chain(n: &FactoredInteger) -> Result<Verdict> {
    let s = n.omega() as u64;
    if s < 2 {
        return Err(Error::Precondition(format!("needs at least two distinct primes, got {s}")));
    }
    let lhs: f64 = n.exponents().map(|e| ((e + 1) as f64).ln()).collect::<Neumaier>().sum();
    let ln_n = n.ln();
    let sf = s as f64;
    let excess = prime_count(s) as f64 - sf;
    let rhs = sf * (2.0 * ln_n / sf).ln() + excess * sf.ln().ln() - std::f64::consts::LN_2.ln();
    let mut holds = lhs <= rhs;
    if near(lhs, rhs) {
        let b = HP_BITS;
        let left = n.exponents().fold(Fixed::zero(b), |acc, e| &acc + &Fixed::ln_u64(e + 1, b));
        let ln_n = n
            .factors()
            .iter()
            .fold(Fixed::zero(b), |acc, &(p, e)| &acc + &Fixed::ln_u64(p, b).mul_int(e as i64));
        let inner = ln_n.mul_int(2).div_int(s as i64).ln().mul_int(s as i64);
        let lnln_s = Fixed::ln_u64(s, b).ln();
        let right = &(&inner + &lnln_s.mul_int(excess as i64)) - &Fixed::ln2(b).ln();
        holds = left <= right;
    }
    Ok(Verdict { holds, lhs, rhs, ratio: (lhs - rhs).exp() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Verdict {
    pub holds: bool,
    pub equality: bool,
    /// `Σ p / m`
    pub ratio: f64,
}

/// `m >= Σ_{p | m} p`, exactly.
pub fn check_lemma4(m: &FactoredInteger) -> Lemma4Verdict {
    let value = m.to_biguint();
    let sum: BigUint = m.factors().iter().map(|&(p, _)| BigUint::from(p)).sum();
    let ratio = if m.is_one() {
        0.0
    } else {
        let (s, v) = (ln_big(&sum), m.ln());
        (s - v).exp()
    };
    Lemma4Verdict { holds: value >= sum, equality: value == sum, ratio }
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top: u64 = (x >> shift).try_into().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalScan {
    pub t: u64,
    /// `Σ ln(a_i + 1)`
    pub log_sum: f64,
    /// `Σ i·a_i`
    pub weight: u128,
    pub ratio: f64,
    pub holds: bool,
    /// `c² t / (8 ln 2)`
    pub log_sum_main: f64,
    /// `c² t² / (16 ln² 2)`
    pub weight_main: f64,
}

fn main_terms(t: u64) -> (f64, f64) {
    let c = c_value();
    let ln2 = std::f64::consts::LN_2;
    let tf = t as f64;
    (c * c * tf / (8.0 * ln2), c * c * tf * tf / (16.0 * ln2 * ln2))
}

/// The near-extremal sequence `a_i = ⌊1/(2^(i/t) - 1)⌋` against the
/// bound checked by [`check_lemma3a`].
pub fn lemma3a_extremal_scan(t: u64) -> Result<ExtremalScan> {
    if t == 0 {
        return Err(Error::Precondition("t must be at least 1".into()));
    }
    let a = block_widths(t);
    let v = lemma3a_verdict(&a);
    let (log_sum_main, weight_main) = main_terms(t);
    Ok(ExtremalScan {
        t,
        log_sum: v.lhs,
        weight: sum_i_ai(&a),
        ratio: v.ratio,
        holds: v.holds,
        log_sum_main,
        weight_main,
    })
}

/// [`lemma3a_extremal_scan`] for every `t = 1..=t_max`, in `t` order.
///
/// With `y_j = ⌊t·log2(1 + 1/j)⌋` one has `a_i = #{j : y_j >= i}`, hence
/// `Σ ln(a_i + 1) = Σ_j y_j ln(1 + 1/j)` and `Σ i·a_i = Σ_j y_j(y_j+1)/2`.
/// Going from `t` to `t + 1` raises each `y_j` by at most one, so the sums
/// are maintained by processing those increments as events.
pub fn lemma3a_extremal_scan_all<F: FnMut(&ExtremalScan)>(t_max: u64, mut visit: F) {
    if t_max == 0 {
        return;
    }
    let ln2 = std::f64::consts::LN_2;
    let j_max = (t_max as f64 / ln2) as u64 + 2;
    let step_ln: Vec<f64> = (0..=j_max).map(|j| if j == 0 { 0.0 } else { (1.0 / j as f64).ln_1p() }).collect();
    // events[t] holds the j whose y_j increases on reaching t
    let mut events: Vec<Vec<u32>> = vec![Vec::new(); t_max as usize + 2];
    let mut y = vec![0u64; j_max as usize + 1];
    let next_time = |j: u64, target: u64| -> u64 {
        // smallest t with floor(t log2(1+1/j)) >= target
        let r = step_ln[j as usize] / ln2;
        let mut t = ((target as f64) / r).ceil().max(1.0) as u64;
        while t > 1 && floor_log_ratio(t - 1, j) >= target {
            t -= 1;
        }
        while floor_log_ratio(t, j) < target {
            t += 1;
        }
        t
    };
    for j in 1..=j_max {
        let t = next_time(j, 1);
        if t <= t_max {
            events[t as usize].push(j as u32);
        }
    }
    let mut log_sum = Neumaier::default();
    let mut weight: u128 = 0;
    for t in 1..=t_max {
        let fired = std::mem::take(&mut events[t as usize]);
        for &j in &fired {
            let j = j as u64;
            let target = y[j as usize] + 1;
            debug_assert_eq!(floor_log_ratio(t, j), target);
            y[j as usize] = target;
            log_sum.add(step_ln[j as usize]);
            weight += target as u128;
            let next = next_time(j, target + 1);
            if next <= t_max {
                events[next as usize].push(j as u32);
            }
        }
        let lhs = log_sum.sum();
        let v = lemma3a_from_sums(lhs, weight, || {
            let a = block_widths(t);
            fixed_sum_ln_plus_one(&a)
        });
        let (log_sum_main, weight_main) = main_terms(t);
        visit(&ExtremalScan {
            t,
            log_sum: lhs,
            weight,
            ratio: v.ratio,
            holds: v.holds,
            log_sum_main,
            weight_main,
        });
    }
}

/// Seeded generators for the randomized suites.
///
/// Lengths are geometric, entry sizes log-uniform; every suite uses
/// ChaCha8 seeded from the caller's seed.
pub struct InputGenerator {
    rng: ChaCha8Rng,
}

impl InputGenerator {
    pub fn new(seed: u64) -> Self {
        InputGenerator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Geometric length with the given mean, clamped to `1..=max`.
    pub fn length(&mut self, mean: f64, max: usize) -> usize {
        let p = 1.0 / mean;
        let u: f64 = self.rng.gen_range(f64::MIN_POSITIVE..1.0);
        let k = (u.ln() / (1.0 - p).ln()).floor() as usize + 1;
        k.clamp(1, max)
    }

    /// Log-uniform integer in `lo..=hi`.
    pub fn log_uniform(&mut self, lo: u64, hi: u64) -> u64 {
        let (a, b) = ((lo as f64).ln(), ((hi + 1) as f64).ln());
        let v = self.rng.gen_range(a..b).exp().floor() as u64;
        v.clamp(lo, hi)
    }

    pub fn sequence(&mut self, lo: u64, hi: u64, mean_len: f64, max_len: usize) -> Vec<u64> {
        let n = self.length(mean_len, max_len);
        (0..n).map(|_| self.log_uniform(lo, hi)).collect()
    }

    /// Random factored integer with `s` distinct primes from the table and
    /// log-uniform exponents up to `max_exp`.
    pub fn factored(&mut self, s: usize, table: &PrimeTable, max_exp: u64) -> FactoredInteger {
        let mut picks = std::collections::BTreeSet::new();
        while picks.len() < s {
            picks.insert(self.rng.gen_range(0..table.count()));
        }
        FactoredInteger::from_sorted_unchecked(
            picks.into_iter().map(|i| (table.prime(i), self.log_uniform(1, max_exp))).collect(),
        )
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.gen_range(0..n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    Lemma2,
    Lemma3a,
    Lemma3b,
    Lemma4,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Lemma2, Suite::Lemma3a, Suite::Lemma3b, Suite::Lemma4];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma2 => "lemma2",
            Suite::Lemma3a => "lemma3a",
            Suite::Lemma3b => "lemma3b",
            Suite::Lemma4 => "lemma4",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: u64,
    pub failures: u64,
    /// Largest `lhs / rhs` seen (for the prime-sum suite, `Σ p / m`).
    pub worst_ratio: Option<f64>,
    /// Up to five failing inputs.
    pub examples: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64) -> Self {
        SuiteReport { suite, seed, checks: 0, failures: 0, worst_ratio: None, examples: Vec::new() }
    }

    fn record(&mut self, holds: bool, ratio: f64, input: impl FnOnce() -> String) {
        self.checks += 1;
        if ratio.is_finite() {
            self.worst_ratio = Some(self.worst_ratio.map_or(ratio, |w| w.max(ratio)));
        }
        if !holds {
            self.failures += 1;
            if self.examples.len() < 5 {
                self.examples.push(input());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Bounds of the random inputs used by [`run_suite`].
pub const MAX_RANDOM_LEN: usize = 1000;
pub const MAX_RANDOM_ENTRY: u64 = 1_000_000;
pub const LEMMA3B_LEVELS: [u64; 4] = [1, 2, 10, 100];

/// `trials` random inputs for one suite. The lemma3b suite runs each trial at
/// every level `A` in [`LEMMA3B_LEVELS`].
pub fn run_suite(suite: Suite, trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut gen = InputGenerator::new(seed);
    let mut report = SuiteReport::new(suite, seed);
    match suite {
        Suite::Lemma3a => {
            for _ in 0..trials {
                let a = gen.sequence(1, MAX_RANDOM_ENTRY, 50.0, MAX_RANDOM_LEN);
                let v = check_lemma3a(&a)?;
                report.record(v.holds, v.ratio, || format!("{a:?}"));
            }
        }
        Suite::Lemma3b => {
            for _ in 0..trials {
                for big_a in LEMMA3B_LEVELS {
                    let a = gen.sequence(big_a, MAX_RANDOM_ENTRY, 50.0, MAX_RANDOM_LEN);
                    let v = check_lemma3b(&a, big_a)?;
                    report.record(v.holds, v.ratio, || format!("A={big_a} {a:?}"));
                }
            }
        }
        Suite::Lemma2 => {
            let table = lemma2_table();
            for _ in 0..trials {
                let s = 2 + gen.below(49) as usize;
                let n = gen.factored(s, table, MAX_RANDOM_ENTRY);
                let v = check_lemma2_chain(&n)?;
                report.record(v.holds, v.ratio, || n.to_string());
            }
        }
        Suite::Lemma4 => {
            let table = lemma2_table();
            for _ in 0..trials {
                let s = 1 + gen.below(20) as usize;
                let m = gen.factored(s, table, 1000);
                let v = check_lemma4(&m);
                let is_prime = m.omega() == 1 && m.factors()[0].1 == 1;
                report.record(v.holds && v.equality == is_prime, v.ratio, || m.to_string());
            }
        }
    }
    Ok(report)
}

fn lemma2_table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::first(10_000).expect("small table"))
}
