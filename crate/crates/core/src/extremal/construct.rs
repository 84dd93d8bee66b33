//! Explicit integers with large `d(d(n))` or `ω(d(n))` under a log budget.
//!
//! The block construction takes widths `a_1 >= ... >= a_t` and gives
//! `a_i` distinct primes the exponent `p_i - 1`, so that
//! `d(n) = p_1^a_1 ⋯ p_t^a_t` and `d(d(n)) = ∏ (a_i + 1)`. All results are
//! reported as sorted signatures (largest exponent on 2), which is the
//! smallest integer with the same exponent multiset. The layout with the
//! blocks in order along the primes is kept as `as_written`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::constant::c_value;
use crate::divisor;
use crate::error::{Error, Result};
use crate::numerics::{ExponentSignature, Neumaier, PrimeTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub t: usize,
    /// Block widths, nonincreasing, all at least 1.
    pub a: Vec<u64>,
    /// The slack term of the closed-form choice of `t`, when used.
    pub eps: Option<f64>,
    /// Natural-log budget this was chosen for, if any.
    pub logx: Option<f64>,
}

impl ConstructionParams {
    /// Widths `a_i = ⌊1/(2^(i/t) - 1)⌋` for `i = 1..=t`.
    pub fn from_t(t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::Precondition("t must be at least 1".into()));
        }
        Ok(ConstructionParams { t, a: block_widths(t as u64), eps: None, logx: None })
    }

    /// Arbitrary widths; must be nonincreasing and positive.
    pub fn from_widths(a: Vec<u64>) -> Result<Self> {
        if a.is_empty() || a.contains(&0) {
            return Err(Error::Precondition("widths must be nonempty and positive".into()));
        }
        if a.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition("widths must be nonincreasing".into()));
        }
        Ok(ConstructionParams { t: a.len(), a, eps: None, logx: None })
    }

    pub fn total_width(&self) -> u64 {
        self.a.iter().sum()
    }
}

/// `y_j = ⌊t·log2(1 + 1/j)⌋` for `j = 1, 2, ...` while positive.
///
/// Values whose fractional part is within `1e-7` of an integer are settled
/// exactly by comparing `2^k·j^t` with `(j+1)^t`.
pub fn floor_log_ratios(t: u64) -> Vec<u64> {
    let mut ys = Vec::new();
    for j in 1.. {
        let y = floor_log_ratio(t, j);
        if y == 0 {
            break;
        }
        ys.push(y);
    }
    ys
}

/// `⌊t·log2(1 + 1/j)⌋`, exact.
pub fn floor_log_ratio(t: u64, j: u64) -> u64 {
    if j == 1 {
        return t;
    }
    let v = t as f64 * (1.0 / j as f64).ln_1p() / std::f64::consts::LN_2;
    if (v - v.round()).abs() < 1e-7 {
        exact_floor_log_ratio(t, j, v.round() as u64)
    } else {
        v.floor() as u64
    }
}

/// Exact `⌊t·log2((j+1)/j)⌋` given a candidate `k` within one of it.
fn exact_floor_log_ratio(t: u64, j: u64, k: u64) -> u64 {
    let t32 = u32::try_from(t).expect("t fits in u32");
    let lhs = BigUint::from(j).pow(t32);
    let rhs = BigUint::from(j + 1).pow(t32);
    // y >= k  <=>  2^k j^t <= (j+1)^t
    let fits = |k: u64| (&lhs << k) <= rhs;
    if fits(k) {
        if fits(k + 1) {
            k + 1
        } else {
            k
        }
    } else {
        k.saturating_sub(1)
    }
}

/// `a_i = ⌊1/(2^(i/t) - 1)⌋ = #{j : y_j >= i}`.
pub fn block_widths(t: u64) -> Vec<u64> {
    let ys = floor_log_ratios(t);
    let mut count = vec![0u64; t as usize + 2];
    for &y in &ys {
        count[y.min(t) as usize] += 1;
    }
    let mut a = vec![0u64; t as usize];
    let mut acc = 0;
    for i in (1..=t as usize).rev() {
        acc += count[i];
        a[i - 1] = acc;
    }
    a
}

/// The closed-form choice `t = ⌊(8 ln 2 / c - ε)·√L / ln L⌋` with
/// `ε = 10 ln ln L / ln L`, where `L` is the natural-log budget.
pub fn choose_t(logx: f64) -> Result<ConstructionParams> {
    if !(logx > std::f64::consts::E) {
        return Err(Error::Domain(format!("log budget {logx} must exceed e")));
    }
    let l2 = logx.ln();
    let l3 = l2.ln();
    let eps = 10.0 * l3 / l2;
    let lead = 8.0 * std::f64::consts::LN_2 / c_value();
    if eps >= lead {
        return Err(Error::Domain(format!(
            "slack {eps:.4} is not below {lead:.4} at log budget {logx}; use the scan"
        )));
    }
    let t = ((lead - eps) * logx.sqrt() / l2).floor();
    if t < 1.0 {
        return Err(Error::Domain(format!("formula gives t < 1 at log budget {logx}")));
    }
    let mut params = ConstructionParams::from_t(t as usize)?;
    params.eps = Some(eps);
    params.logx = Some(logx);
    Ok(params)
}

/// Largest `t` whose construction fits the budget. Each `a_i` grows with
/// `t`, so both the sorted `ln n` and `d(d(n))` grow with `t` and the
/// largest feasible `t` is also the best one.
pub fn scan_t(logx: f64, table: &PrimeTable) -> Result<ConstructionParams> {
    let t = largest_feasible(|t| {
        let a = block_widths(t);
        Ok(match sorted_log_n(&a, table) {
            Ok(ln) => fits(ln, logx),
            Err(Error::TableTooSmall { .. }) if table.total_log() > logx => false,
            Err(e) => return Err(e),
        })
    })?;
    if t == 0 {
        return Err(Error::Domain(format!("log budget {logx} is below ln 2")));
    }
    let mut params = ConstructionParams::from_t(t as usize)?;
    params.logx = Some(logx);
    Ok(params)
}

/// Budget test used by the constructions: conservative by `1e-9` relative,
/// so a reported construction certainly satisfies `n <= x`.
pub fn fits(log_n: f64, logx: f64) -> bool {
    log_n <= logx - 1e-9 * logx.abs().max(1.0)
}

/// Largest `k >= 0` with `feasible(k)`, for a monotone predicate with
/// `feasible(0)` assumed true.
fn largest_feasible<F: FnMut(u64) -> Result<bool>>(mut feasible: F) -> Result<u64> {
    if !feasible(1)? {
        return Ok(0);
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while feasible(hi)? {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `ln n` of the sorted signature for widths `a`: block `i` holds `a_i`
/// copies of `p_i - 1`, and the blocks go onto the primes in the order
/// `t, t-1, ..., 1`.
pub fn sorted_log_n(a: &[u64], table: &PrimeTable) -> Result<f64> {
    let total: u64 = a.iter().sum();
    table.ensure(total as usize)?;
    table.ensure(a.len())?;
    let mut acc = Neumaier::default();
    let mut start = 0usize;
    for i in (0..a.len()).rev() {
        let end = start + a[i] as usize;
        let span = table.log_prefix(end) - table.log_prefix(start);
        acc.add((table.prime(i) - 1) as f64 * span);
        start = end;
    }
    Ok(acc.sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub signature: ExponentSignature,
    /// Exponents of `p_1, p_2, ...` with the blocks laid out in order.
    pub as_written: Vec<u64>,
    pub log_n: f64,
    pub log_n_as_written: f64,
    /// `ln d(d(n)) = Σ ln(a_i + 1)`.
    pub log_dd: f64,
    pub sum_i_ai: u128,
}

pub fn optimal_construct(params: &ConstructionParams, table: &PrimeTable) -> Result<Construction> {
    let total = params.total_width() as usize;
    table.ensure(total)?;
    let mut as_written = Vec::with_capacity(total);
    for (i, &w) in params.a.iter().enumerate() {
        let e = table.prime(i) - 1;
        as_written.extend(std::iter::repeat_n(e, w as usize));
    }
    let mut sorted = Vec::with_capacity(total);
    for (i, &w) in params.a.iter().enumerate().rev() {
        let e = table.prime(i) - 1;
        sorted.extend(std::iter::repeat_n(e, w as usize));
    }
    let signature = ExponentSignature::from_sorted_unchecked(sorted);
    let log_n = signature.ln(table);
    let log_n_as_written: f64 = as_written
        .iter()
        .zip(table.logs())
        .map(|(&e, &l)| e as f64 * l)
        .collect::<Neumaier>()
        .sum();
    let log_dd: f64 = params.a.iter().map(|&w| ((w + 1) as f64).ln()).collect::<Neumaier>().sum();
    let check = divisor::log_dd(&signature);
    assert!(
        (check - log_dd).abs() <= 1e-9 * log_dd.max(1.0),
        "block identity broken: {check} vs {log_dd}"
    );
    let sum_i_ai = params
        .a
        .iter()
        .enumerate()
        .map(|(i, &w)| (i as u128 + 1) * w as u128)
        .sum();
    Ok(Construction { signature, as_written, log_n, log_n_as_written, log_dd, sum_i_ai })
}

/// Block construction for a budget, by scan.
pub fn best_construction(logx: f64, table: &PrimeTable) -> Result<(ConstructionParams, Construction)> {
    let params = scan_t(logx, table)?;
    let built = optimal_construct(&params, table)?;
    Ok((params, built))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrangement {
    pub signature: ExponentSignature,
    /// Exponent of `p_i` in the textbook layout.
    pub as_written: Vec<u64>,
}

/// `2^1·3^2·5^4 ⋯ p_k^(p_k - 1)`, for which `d(n)` is the primorial
/// `p_1 ⋯ p_k` and `d(d(n)) = 2^k`.
pub fn ramanujan_construct(k: usize, table: &PrimeTable) -> Result<Arrangement> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    table.ensure(k)?;
    let as_written: Vec<u64> = table.primes()[..k].iter().map(|&p| p - 1).collect();
    let signature = ExponentSignature::from_sorted_unchecked(as_written.iter().rev().copied().collect());
    Ok(Arrangement { signature, as_written })
}

/// Same exponent multiset as [`ramanujan_construct`]; here the point is
/// that `d(n)` has exactly `s` distinct prime factors.
pub fn wx_construct(s: usize, table: &PrimeTable) -> Result<ExponentSignature> {
    if s == 0 {
        return Err(Error::Precondition("s must be at least 1".into()));
    }
    Ok(ramanujan_construct(s, table)?.signature)
}

/// `ln n` of the sorted signature `(p_k - 1, ..., p_1 - 1)`.
pub fn prime_tower_log_n(k: usize, table: &PrimeTable) -> Result<f64> {
    table.ensure(k)?;
    Ok((0..k)
        .map(|i| (table.prime(k - 1 - i) - 1) as f64 * table.log(i))
        .collect::<Neumaier>()
        .sum())
}

/// Largest `k` with `(p_k - 1, ..., p_1 - 1)` inside the budget; 0 if none.
/// The sorted value grows with `k`, since the `i`-th largest exponent only
/// increases when an element is added.
pub fn prime_tower_for_budget(logx: f64, table: &PrimeTable) -> Result<usize> {
    let k = largest_feasible(|k| {
        Ok(match prime_tower_log_n(k as usize, table) {
            Ok(ln) => fits(ln, logx),
            Err(Error::TableTooSmall { .. }) if table.total_log() > logx => false,
            Err(e) => return Err(e),
        })
    })?;
    Ok(k as usize)
}

/// Largest `k` with `p_1 ⋯ p_k` inside the budget; `d = 2^k`.
pub fn primorial_for_budget(logx: f64, table: &PrimeTable) -> Result<usize> {
    let k = largest_feasible(|k| {
        if k as usize > table.count() {
            if table.total_log() > logx {
                return Ok(false);
            }
            return Err(Error::TableTooSmall { need: k as usize, have: table.count() });
        }
        Ok(fits(table.log_prefix(k as usize), logx))
    })?;
    Ok(k as usize)
}
