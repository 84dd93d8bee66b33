//! Lower-bound constructions and exact maxima over `n <= x`.

mod construct;
mod convergence;
mod enumerate;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::numerics::ExponentSignature;

pub use construct::{
    best_construction, block_widths, choose_t, fits, floor_log_ratio, floor_log_ratios, optimal_construct,
    prime_tower_for_budget, prime_tower_log_n, primorial_for_budget, ramanujan_construct, scan_t,
    sorted_log_n, wx_construct, Arrangement, Construction, ConstructionParams,
};
pub use convergence::{
    convergence_row, convergence_table, normalize, ConvergenceOptions, ConvergenceRow, OracleCell,
    OMEGA_LIMIT, TOWER_LIMIT,
};
pub use enumerate::{divisor_and_omega_tables, full_enumeration_max, MAX_ENUMERATION};
pub use oracle::{
    oracle_max, oracle_max_exact, oracle_max_with, Budget, OracleOptions, DEFAULT_NODE_LIMIT,
    UNPRUNED_CHECK_MAX_LOG,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    /// `ln d(n)`
    LogD,
    /// `ln d(d(n))`
    LogDd,
    /// `ω(d(n))`
    OmegaD,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub objective: Objective,
    pub best_signature: ExponentSignature,
    /// `d(n)`, `d(d(n))` or `ω(d(n))` of the best signature.
    pub value: u128,
    pub nodes: u64,
    pub proven_optimal: bool,
    /// The best signature sits within the log tolerance of the budget and
    /// was accepted without an exact check.
    pub near_boundary: bool,
}

impl SearchResult {
    /// `ln` of the value for the log objectives, the count itself for `ω`.
    pub fn objective_value(&self) -> f64 {
        match self.objective {
            Objective::OmegaD => self.value as f64,
            _ => (self.value as f64).ln(),
        }
    }
}
