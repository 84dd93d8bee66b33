//! Normalized statistics of the constructions across budgets.
//!
//! For a natural-log budget `L` the normalized form of a value `v` is
//! `v · ln L / √L`. Applied to `ln d(d(n))` it is compared with `c`, to
//! `ω(d(n))` with `√8`, and for the prime-tower integer (`d(d(n)) = 2^k`)
//! with `√2 ln 4`.

use serde::{Deserialize, Serialize};

use super::construct::{best_construction, prime_tower_for_budget};
use super::oracle::{oracle_max_with, Budget, OracleOptions};
use super::{Objective, SearchResult};
use crate::error::{Error, Result};
use crate::numerics::PrimeTable;

/// `√2 ln 4`, the normalized limit of the prime-tower construction.
pub const TOWER_LIMIT: f64 = 1.960_516_286_937_094_5;

/// `√8`.
pub const OMEGA_LIMIT: f64 = 2.828_427_124_746_190_3;

/// `v · ln L / √L`, defined for `L > 1`.
pub fn normalize(value: f64, log_budget: f64) -> Option<f64> {
    (log_budget > 1.0).then(|| value * log_budget.ln() / log_budget.sqrt())
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceOptions {
    /// Node limit for each oracle run; 0 skips the oracle.
    pub oracle_node_limit: u64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions { oracle_node_limit: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCell {
    /// `ln d(d(n))` or `ω(d(n))`.
    pub value: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub log_budget: f64,
    /// Block count of the best block construction.
    pub t: usize,
    pub construction_log_dd: f64,
    pub construction_normalized: f64,
    /// Prime-tower length `k`: `d(d(n)) = 2^k` and `ω(d(n)) = k`.
    pub tower_k: usize,
    pub tower_log_dd: f64,
    pub tower_normalized: f64,
    pub omega_normalized: f64,
    pub oracle_log_dd: Option<OracleCell>,
    pub oracle_omega: Option<OracleCell>,
}

/// One row per budget. Budgets must exceed `e^e`.
pub fn convergence_table(budgets: &[f64], opts: ConvergenceOptions) -> Vec<Result<ConvergenceRow>> {
    let largest = budgets.iter().copied().filter(|l| l.is_finite()).fold(0.0, f64::max);
    let table = match PrimeTable::covering_log_budget(largest) {
        Ok(t) => t,
        Err(e) => {
            let msg = e.to_string();
            return budgets.iter().map(|_| Err(Error::Precondition(msg.clone()))).collect();
        }
    };
    budgets.iter().map(|&l| convergence_row(l, &table, opts)).collect()
}

pub fn convergence_row(log_budget: f64, table: &PrimeTable, opts: ConvergenceOptions) -> Result<ConvergenceRow> {
    if !(log_budget > std::f64::consts::E.exp()) || !log_budget.is_finite() {
        return Err(Error::Domain(format!("log budget {log_budget} must exceed e^e")));
    }
    let norm = |v: f64| normalize(v, log_budget).expect("budget above 1");
    let (params, built) = best_construction(log_budget, table)?;
    let k = prime_tower_for_budget(log_budget, table)?;
    let tower_log_dd = k as f64 * std::f64::consts::LN_2;
    let oracle = |objective| -> Option<OracleCell> {
        if opts.oracle_node_limit == 0 {
            return None;
        }
        let limits = OracleOptions { node_limit: opts.oracle_node_limit, check_unpruned: false };
        let cell = |r: &SearchResult| {
            let value = match objective {
                Objective::OmegaD => r.value as f64,
                _ => (r.value as f64).ln(),
            };
            OracleCell { value, normalized: norm(value) }
        };
        // a partial search is not a maximum, so it is left out
        oracle_max_with(&Budget::Log(log_budget), objective, table, limits).ok().map(|r| cell(&r))
    };
    Ok(ConvergenceRow {
        log_budget,
        t: params.t,
        construction_log_dd: built.log_dd,
        construction_normalized: norm(built.log_dd),
        tower_k: k,
        tower_log_dd,
        tower_normalized: norm(tower_log_dd),
        omega_normalized: norm(k as f64),
        oracle_log_dd: oracle(Objective::LogDd),
        oracle_omega: oracle(Objective::OmegaD),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        assert!((TOWER_LIMIT - 2f64.sqrt() * 4f64.ln()).abs() < 1e-15);
        assert!((OMEGA_LIMIT - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normalize_examples() {
        let v = normalize(10.0, 100.0).unwrap();
        assert!((v - 10.0 * 100f64.ln() / 10.0).abs() < 1e-12);
        assert!(normalize(1.0, 1.0).is_none());
    }

    #[test]
    fn rows() {
        let rows = convergence_table(&[20.0, 100.0, 1000.0, 5.0], ConvergenceOptions::default());
        assert!(matches!(rows[3], Err(Error::Domain(_))));
        for row in rows[..3].iter() {
            let row = row.as_ref().unwrap();
            if let Some(dd) = &row.oracle_log_dd {
                assert!(dd.value + 1e-9 >= row.construction_log_dd);
                assert!(dd.value + 1e-9 >= row.tower_log_dd);
            }
            if let Some(om) = &row.oracle_omega {
                assert!(om.value >= row.tower_k as f64);
            }
        }
        let small = rows[0].as_ref().unwrap();
        assert!(small.oracle_log_dd.is_some() && small.oracle_omega.is_some());
        let skipped = convergence_table(&[20.0], ConvergenceOptions { oracle_node_limit: 0 });
        assert!(skipped[0].as_ref().unwrap().oracle_log_dd.is_none());
        assert!(convergence_table(&[], ConvergenceOptions::default()).is_empty());
    }
}
