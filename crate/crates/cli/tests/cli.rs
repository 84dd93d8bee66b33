use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use iterdiv::mn::brute_force_mn;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iterdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn constant_one_digit() {
    let o = run(&["constant", "--digits", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2.8");
}

#[test]
fn constant_json_has_string_c() {
    let o = run(&["--json", "constant", "--digits", "12"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["c"].as_str(), Some("2.795981664130"));
    assert_eq!(v["digits"], 12);
    assert!(v["error_bound"].as_f64().unwrap() < 1e-12);
}

#[test]
fn constant_too_many_digits_is_usage_error() {
    let o = run(&["constant", "--digits", "51"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}

#[test]
fn unknown_subcommand_exits_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["extremal", "--log10x", "3", "--obj", "xx"]).status.code(), Some(2));
}

#[test]
fn mn_examples() {
    assert_eq!(stdout(&run(&["mn", "1"])).trim(), "1");
    assert_eq!(stdout(&run(&["mn", "12"])).trim(), "2^2·3·5 = 60");
    let o = run(&["--json", "mn", "48"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let decimal: u64 = v["decimal"].as_str().unwrap().parse().unwrap();
    assert_eq!(Some(decimal), brute_force_mn(48, 1_000_000).unwrap());
    assert_eq!(decimal, 2520);
}

#[test]
fn mn_zero_is_precondition_error() {
    assert_eq!(run(&["mn", "0"]).status.code(), Some(2));
}

#[test]
fn mn_pruning_flag_agrees() {
    for n in ["720", "5040", "1024"] {
        assert_eq!(stdout(&run(&["mn", n])), stdout(&run(&["mn", n, "--no-pruning"])));
    }
}

#[test]
fn extremal_small_budget() {
    let o = run(&["extremal", "--log10x", "2", "--obj", "d", "--mode", "both"]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = r.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["log10x", "method", "value", "normalized", "proven_optimal"]);
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    // n <= 100 has at most 12 divisors
    assert_eq!(&rows[1][1], "oracle");
    assert_eq!(&rows[1][2], "12");
    assert_eq!(&rows[1][4], "true");
    let construct: u64 = rows[0][2].parse().unwrap();
    assert!(construct <= 12);
}

#[test]
fn extremal_zero_budget_is_one() {
    let o = run(&["--json", "extremal", "--log10x", "0", "--obj", "dd", "--mode", "both"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for row in v.as_array().unwrap() {
        assert_eq!(row["value"], "1");
        assert_eq!(row["signature"], "()");
        assert!(row["normalized"].is_null());
    }
}

#[test]
fn extremal_rejects_negative_budget() {
    let o = run(&["extremal", "--log10x", "-1", "--obj", "d"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn extremal_node_limit_marks_unproven() {
    let o = run(&["extremal", "--log10x", "30", "--obj", "dd", "--node-limit", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().ends_with(",false"), "{text}");
}

#[test]
fn verify_reports_and_exit_codes() {
    let o = run(&["verify", "all", "--trials", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("total: checks=0 failures=0"));
    let o = run(&["--json", "verify", "lemma4", "--trials", "50", "--seed", "9"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["failures"], 0);
    assert_eq!(v["checks"], 50);
    assert_eq!(run(&["verify", "lemma9"]).status.code(), Some(2));
}

#[test]
fn verify_is_reproducible() {
    let a = run(&["verify", "lemma3a", "--trials", "100", "--seed", "4"]);
    let b = run(&["verify", "lemma3a", "--trials", "100", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table_empty_list_is_header_only() {
    let path = scratch("empty_budgets.txt");
    fs::write(&path, "# nothing\n\n").unwrap();
    let o = run(&["table", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("log_budget,log10x,t,"));
}

#[test]
fn table_bad_file_is_usage_error() {
    let path = scratch("bad_budgets.txt");
    fs::write(&path, "20\nabc\n").unwrap();
    assert_eq!(run(&["table", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["table", "/nonexistent/budgets"]).status.code(), Some(2));
}

#[test]
fn table_csv_round_trips_json() {
    let path = scratch("budgets.txt");
    fs::write(&path, "20\n100 # comment\n").unwrap();
    let out = scratch("table.csv");
    let o = run(&["table", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv_text = fs::read_to_string(&out).unwrap();
    let json = run(&["--json", "table", path.to_str().unwrap()]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&json.stdout).unwrap();

    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = r.headers().unwrap().clone();
    let records: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(records.len(), 2);
    for (rec, row) in records.iter().zip(&rows) {
        for (h, cell) in headers.iter().zip(rec.iter()) {
            let expect = &row[h];
            if cell.is_empty() {
                assert!(expect.is_null(), "{h}");
            } else if let Some(x) = expect.as_f64() {
                let got: f64 = cell.parse().unwrap();
                assert!((got - x).abs() <= 1e-9 * x.abs().max(1.0), "{h}: {got} vs {x}");
            }
        }
    }
}
