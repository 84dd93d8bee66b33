//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": "..."}` so the page needs no exception handling.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use iterdiv::constant::compute_c;
use iterdiv::extremal::{convergence_table, ConvergenceOptions};
use iterdiv::mn::min_with_divisor_count;
use iterdiv::numerics::PrimeTable;

/// Largest natural-log budget the page may ask for.
pub const MAX_PAGE_BUDGET: f64 = 1e7;

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("serializable"),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn constant(digits: u32) -> String {
    respond(compute_c(digits).map_err(|e| e.to_string()).map(|r| {
        json!({
            "c": r.rounded,
            "digits": r.digits,
            "terms_summed": r.terms_summed,
            "error_bound": r.c.err_f64(),
        })
    }))
}

#[wasm_bindgen]
pub fn smallest_with_divisors(n: f64) -> String {
    let run = || -> Result<_, String> {
        if !(n >= 1.0) || n.fract() != 0.0 || n > 1e12 {
            return Err(format!("N must be an integer in 1..=10^12, got {n}"));
        }
        let table = PrimeTable::first(64).map_err(|e| e.to_string())?;
        let m = min_with_divisor_count(n as u64, &table).map_err(|e| e.to_string())?;
        let log10 = m.ln() / std::f64::consts::LN_10;
        Ok(json!({
            "N": n as u64,
            "factored": m.to_string(),
            "log10": log10,
            "decimal": (log10 < 60.0).then(|| m.to_biguint().to_string()),
        }))
    };
    respond(run())
}

#[derive(Serialize)]
struct Point {
    log_budget: f64,
    t: usize,
    construction: f64,
    tower: f64,
    omega: f64,
}

/// Normalized statistics for `count` budgets spaced geometrically in `[lo, hi]`.
#[wasm_bindgen]
pub fn convergence(lo: f64, hi: f64, count: u32) -> String {
    let run = || -> Result<Vec<Point>, String> {
        if !(lo > std::f64::consts::E.exp()) || !(hi >= lo) || hi > MAX_PAGE_BUDGET {
            return Err(format!("need e^e < lo <= hi <= {MAX_PAGE_BUDGET:e}"));
        }
        if count == 0 || count > 200 {
            return Err("count must be in 1..=200".into());
        }
        let budgets: Vec<f64> = (0..count)
            .map(|i| {
                let f = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                lo * (hi / lo).powf(f)
            })
            .collect();
        convergence_table(&budgets, ConvergenceOptions { oracle_node_limit: 0 })
            .into_iter()
            .map(|row| {
                let row = row.map_err(|e| e.to_string())?;
                Ok(Point {
                    log_budget: row.log_budget,
                    t: row.t,
                    construction: row.construction_normalized,
                    tower: row.tower_normalized,
                    omega: row.omega_normalized,
                })
            })
            .collect()
    };
    respond(run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn constant_digits() {
        let v = parse(constant(5));
        assert_eq!(v["c"], "2.79598");
        assert!(parse(constant(0))["error"].is_string());
    }

    #[test]
    fn smallest() {
        let v = parse(smallest_with_divisors(12.0));
        assert_eq!(v["factored"], "2^2·3·5");
        assert_eq!(v["decimal"], "60");
        assert!(parse(smallest_with_divisors(0.5))["error"].is_string());
        assert!(parse(smallest_with_divisors(1e13))["error"].is_string());
    }

    #[test]
    fn convergence_points() {
        let v = parse(convergence(100.0, 1e4, 3));
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 3);
        assert!((pts[2]["log_budget"].as_f64().unwrap() - 1e4).abs() < 1e-6);
        assert!((pts[2]["construction"].as_f64().unwrap() - 3.657).abs() < 1e-3);
        assert!(parse(convergence(1.0, 10.0, 3))["error"].is_string());
        assert!(parse(convergence(100.0, 1e9, 3))["error"].is_string());
    }
}
