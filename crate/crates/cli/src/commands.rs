use std::error::Error;
use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use serde::Serialize;

use iterdiv::constant::compute_c;
use iterdiv::divisor;
use iterdiv::extremal::{
    best_construction, convergence_table, normalize, oracle_max_with, prime_tower_for_budget,
    primorial_for_budget, wx_construct, Budget, ConvergenceOptions, ConvergenceRow, Objective,
    OracleOptions, OMEGA_LIMIT, TOWER_LIMIT,
};
use iterdiv::lab::{run_suite, Suite, SuiteReport};
use iterdiv::mn::{min_with_divisor_count_opts, MnOptions};
use iterdiv::numerics::{ExponentSignature, PrimeTable};
use iterdiv::Error as CoreError;

use crate::output::{self, Format, Report};
use crate::Mode;

type CmdResult = Result<Report, Box<dyn Error>>;

pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;
pub const TABLE_NODE_LIMIT: u64 = 2_000_000;

#[derive(Serialize)]
struct ConstantReport {
    c: String,
    digits: u32,
    terms_summed: u64,
    tail_bound: f64,
    error_bound: f64,
}

pub fn constant(digits: u32, format: Format) -> CmdResult {
    let r = compute_c(digits)?;
    if format.json {
        return Ok(Report::ok(output::json(&ConstantReport {
            c: r.rounded,
            digits: r.digits,
            terms_summed: r.terms_summed,
            tail_bound: r.tail_bound,
            error_bound: r.c.err_f64(),
        })));
    }
    Ok(Report::ok(format!("{}\n", r.rounded)))
}

#[derive(Serialize)]
struct MnReport {
    #[serde(rename = "N")]
    n: u64,
    factors: Vec<(u64, u64)>,
    log10: f64,
    decimal: Option<String>,
}

pub fn mn(n: u64, pruning: bool, format: Format) -> CmdResult {
    let table = PrimeTable::first(64)?;
    let m = min_with_divisor_count_opts(n, &table, MnOptions { structural_pruning: pruning })?;
    let log10 = m.ln() / std::f64::consts::LN_10;
    let decimal = (log10 < 30.0).then(|| m.to_biguint().to_string());
    if format.json {
        return Ok(Report::ok(output::json(&MnReport {
            n,
            factors: m.factors().to_vec(),
            log10,
            decimal,
        })));
    }
    let text = match decimal {
        Some(d) if !m.is_one() => format!("{m} = {d}\n"),
        _ => format!("{m}\n"),
    };
    Ok(Report::ok(text))
}

#[derive(Serialize)]
struct ExtremalRow {
    log10x: f64,
    method: &'static str,
    value: String,
    normalized: Option<f64>,
    proven_optimal: bool,
    #[serde(skip)]
    signature: String,
}

#[derive(Serialize)]
struct ExtremalJson<'a> {
    log10x: f64,
    method: &'a str,
    value: &'a str,
    normalized: Option<f64>,
    proven_optimal: bool,
    signature: &'a str,
}

const EXTREMAL_HEADER: [&str; 5] = ["log10x", "method", "value", "normalized", "proven_optimal"];

/// `ln v` for the log objectives, `v` for `ω`, scaled so the limits are
/// constants: `ln d · ln L / L`, `ln d(d) · ln L / √L`, `ω(d) · ln L / √L`.
pub fn normalized(objective: Objective, value: f64, log_budget: f64) -> Option<f64> {
    match objective {
        Objective::LogD => (log_budget > 1.0).then(|| value * log_budget.ln() / log_budget),
        _ => normalize(value, log_budget),
    }
}

fn objective_of(objective: Objective, sig: &ExponentSignature) -> BigUint {
    match objective {
        Objective::LogD => divisor::d_exact(sig),
        Objective::LogDd => divisor::dd_exact(sig),
        Objective::OmegaD => BigUint::from(divisor::omega_d(sig)),
    }
}

fn objective_log(objective: Objective, value: &BigUint) -> f64 {
    let v: f64 = value.to_string().parse().unwrap_or(f64::INFINITY);
    match objective {
        Objective::OmegaD => v,
        _ => {
            let bits = value.bits();
            if bits < 1000 {
                v.ln()
            } else {
                let shift = bits - 64;
                let top: u64 = (value >> shift).try_into().expect("64 bits");
                (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
            }
        }
    }
}

fn construct_signature(objective: Objective, log_budget: f64, table: &PrimeTable) -> Result<ExponentSignature, CoreError> {
    match objective {
        Objective::LogD => {
            let k = primorial_for_budget(log_budget, table)?;
            Ok(ExponentSignature::new(vec![1; k])?)
        }
        Objective::LogDd => match best_construction(log_budget, table) {
            Ok((_, built)) => Ok(built.signature),
            // not even t = 1 fits: only n = 1
            Err(CoreError::Domain(_)) => Ok(ExponentSignature::one()),
            Err(e) => Err(e),
        },
        Objective::OmegaD => {
            let k = prime_tower_for_budget(log_budget, table)?;
            if k == 0 {
                Ok(ExponentSignature::one())
            } else {
                wx_construct(k, table)
            }
        }
    }
}

fn method_name(objective: Objective) -> &'static str {
    match objective {
        Objective::LogD => "primorial",
        Objective::LogDd => "blocks",
        Objective::OmegaD => "tower",
    }
}

pub fn extremal(log10x: f64, objective: Objective, mode: Mode, node_limit: u64, format: Format) -> CmdResult {
    if !(log10x >= 0.0) || !log10x.is_finite() {
        return Err(format!("--log10x must be a finite number >= 0, got {log10x}").into());
    }
    let log_budget = log10x * std::f64::consts::LN_10;
    let table = PrimeTable::covering_log_budget(log_budget)?;
    let mut rows = Vec::new();
    let mut push = |method, sig: &ExponentSignature, proven| {
        let value = objective_of(objective, sig);
        let norm = normalized(objective, objective_log(objective, &value), log_budget);
        rows.push(ExtremalRow {
            log10x,
            method,
            value: value.to_string(),
            normalized: norm,
            proven_optimal: proven,
            signature: sig.to_string(),
        });
    };
    if matches!(mode, Mode::Construct | Mode::Both) {
        let sig = construct_signature(objective, log_budget, &table)?;
        push(method_name(objective), &sig, false);
    }
    if matches!(mode, Mode::Oracle | Mode::Both) {
        let budget = if log10x.fract() == 0.0 && log10x <= 10_000.0 {
            Budget::Integer(BigUint::from(10u32).pow(log10x as u32))
        } else {
            Budget::Log(log_budget)
        };
        let opts = OracleOptions { node_limit, check_unpruned: false };
        match oracle_max_with(&budget, objective, &table, opts) {
            Ok(r) => push("oracle", &r.best_signature, r.proven_optimal),
            Err(CoreError::Resource { partial }) => push("oracle", &partial.best_signature, false),
            Err(e) => return Err(e.into()),
        }
    }
    if format.json {
        let view: Vec<ExtremalJson> = rows
            .iter()
            .map(|r| ExtremalJson {
                log10x: r.log10x,
                method: r.method,
                value: &r.value,
                normalized: r.normalized,
                proven_optimal: r.proven_optimal,
                signature: &r.signature,
            })
            .collect();
        return Ok(Report::ok(output::json(&view)));
    }
    Ok(Report::ok(output::csv(&rows, &EXTREMAL_HEADER)?))
}

#[derive(Serialize)]
struct VerifyReport {
    checks: u64,
    failures: u64,
    suites: Vec<SuiteReport>,
}

pub fn verify(suite: &str, trials: u64, seed: u64, format: Format) -> CmdResult {
    let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
    let reports = suites
        .into_iter()
        .map(|s| run_suite(s, trials, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let checks = reports.iter().map(|r| r.checks).sum();
    let failures = reports.iter().map(|r| r.failures).sum();
    let status = if failures == 0 { 0 } else { 1 };
    let text = if format.json {
        output::json(&VerifyReport { checks, failures, suites: reports })
    } else {
        let mut s = String::new();
        for r in &reports {
            let worst = r.worst_ratio.map_or("-".to_string(), |w| format!("{w:.6}"));
            s += &format!(
                "{}: checks={} failures={} worst_ratio={} seed={}\n",
                r.suite, r.checks, r.failures, worst, r.seed
            );
            for ex in &r.examples {
                s += &format!("  violation: {ex}\n");
            }
        }
        s += &format!("total: checks={checks} failures={failures}\n");
        s
    };
    Ok(Report { text, status })
}

pub const TABLE_HEADER: [&str; 17] = [
    "log_budget",
    "log10x",
    "t",
    "construction_log_dd",
    "construction_normalized",
    "construction_over_c",
    "tower_k",
    "tower_log_dd",
    "tower_normalized",
    "tower_over_limit",
    "omega_normalized",
    "omega_over_sqrt8",
    "oracle_log_dd",
    "oracle_log_dd_normalized",
    "oracle_omega",
    "oracle_omega_normalized",
    "error",
];

#[derive(Default, Serialize)]
struct TableRecord {
    log_budget: f64,
    log10x: f64,
    t: Option<usize>,
    construction_log_dd: Option<f64>,
    construction_normalized: Option<f64>,
    construction_over_c: Option<f64>,
    tower_k: Option<usize>,
    tower_log_dd: Option<f64>,
    tower_normalized: Option<f64>,
    tower_over_limit: Option<f64>,
    omega_normalized: Option<f64>,
    omega_over_sqrt8: Option<f64>,
    oracle_log_dd: Option<f64>,
    oracle_log_dd_normalized: Option<f64>,
    oracle_omega: Option<f64>,
    oracle_omega_normalized: Option<f64>,
    error: Option<String>,
}

impl TableRecord {
    fn from_row(row: &ConvergenceRow) -> Self {
        let c = iterdiv::constant::c_value();
        TableRecord {
            log_budget: row.log_budget,
            log10x: row.log_budget / std::f64::consts::LN_10,
            t: Some(row.t),
            construction_log_dd: Some(row.construction_log_dd),
            construction_normalized: Some(row.construction_normalized),
            construction_over_c: Some(row.construction_normalized / c),
            tower_k: Some(row.tower_k),
            tower_log_dd: Some(row.tower_log_dd),
            tower_normalized: Some(row.tower_normalized),
            tower_over_limit: Some(row.tower_normalized / TOWER_LIMIT),
            omega_normalized: Some(row.omega_normalized),
            omega_over_sqrt8: Some(row.omega_normalized / OMEGA_LIMIT),
            oracle_log_dd: row.oracle_log_dd.as_ref().map(|o| o.value),
            oracle_log_dd_normalized: row.oracle_log_dd.as_ref().map(|o| o.normalized),
            oracle_omega: row.oracle_omega.as_ref().map(|o| o.value),
            oracle_omega_normalized: row.oracle_omega.as_ref().map(|o| o.normalized),
            error: None,
        }
    }
}

/// Budgets file: one natural-log budget per line, `#` starts a comment.
pub fn read_budgets(path: &Path) -> Result<Vec<f64>, Box<dyn Error>> {
    let text = fs::read_to_string(path)?;
    let mut budgets = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| format!("{}:{}: not a number: {line:?}", path.display(), no + 1))?;
        budgets.push(v);
    }
    Ok(budgets)
}

pub fn table(path: &Path, node_limit: u64, format: Format) -> CmdResult {
    let budgets = read_budgets(path)?;
    let rows = convergence_table(&budgets, ConvergenceOptions { oracle_node_limit: node_limit });
    let records: Vec<TableRecord> = budgets
        .iter()
        .zip(&rows)
        .map(|(&l, row)| match row {
            Ok(row) => TableRecord::from_row(row),
            Err(e) => TableRecord {
                log_budget: l,
                log10x: l / std::f64::consts::LN_10,
                error: Some(e.to_string()),
                ..Default::default()
            },
        })
        .collect();
    if format.json {
        return Ok(Report::ok(output::json(&records)));
    }
    Ok(Report::ok(output::csv(&records, &TABLE_HEADER)?))
}
