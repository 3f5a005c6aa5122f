//! End-to-end tests of the binary: formats, schemas, exit codes, config
//! round trips and thread-count invariance.

use std::process::{Command, Output};

use smoothgaps_cli::config::RunConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_smoothgaps"));
    c.env_remove("SMOOTHGAPS_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn psi_row_matches_expected_values() {
    let out = run(&["psi", "--x", "100", "--y", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("100,,5,34,"), "psi row missing: {text}");
    assert!(text.starts_with("# config="));
}

#[test]
fn gaps_streams_expected_rows() {
    let out = run(&["gaps", "--bound", "const:3", "--limit", "13"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let rows: Vec<&str> = text.lines().skip(2).collect(); // config + header
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[6], "7,9,12,3,3,3,2,");
}

#[test]
fn pigeonhole_jsonl_reports_certified_pair() {
    let out = run(&["pigeonhole", "--log-x", "100", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut saw_result = false;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("valid json line");
        assert_eq!(v["schema_version"], 1);
        if v["type"] == "pigeonhole" {
            saw_result = true;
            assert_eq!(v["regime"], "constructive");
            assert_eq!(v["certified"], true);
            assert!(v["pair_lo"].as_str().unwrap().len() > 20, "big pair expected");
        }
    }
    assert!(saw_result);
}

#[test]
fn exit_codes_follow_error_classes() {
    // Usage error from an unknown flag.
    let out = run(&["gaps", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));

    // Numeric-kind mismatch is a usage error.
    let out = run(&["pigeonhole", "--log-x", "100", "--numeric", "64"]);
    assert_eq!(out.status.code(), Some(1));

    // Capacity: the projected population exceeds the enumeration cap.
    let out = run(&["pigeonhole", "--log-x", "6000"]);
    assert_eq!(out.status.code(), Some(2));

    // Construction failure: powers of two leave singleton bins.
    let out = run(&["pigeonhole", "--log-x", "16", "--bound", "const:2"]);
    assert_eq!(out.status.code(), Some(3));

    // Errors are structured records on stderr.
    let err = String::from_utf8(out.stderr).unwrap();
    let v: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert_eq!(v["type"], "error");
    assert_eq!(v["kind"], "construction_failed");
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let base = run(&["gaps", "--bound", "const:5", "--limit", "50000", "--segment", "4096"]);
    assert_eq!(base.status.code(), Some(0));
    let again = run(&["gaps", "--bound", "const:5", "--limit", "50000", "--segment", "4096"]);
    assert_eq!(base.stdout, again.stdout, "identical runs must match bytes");

    for threads in ["2", "4"] {
        let out = run(&[
            "gaps", "--bound", "const:5", "--limit", "50000", "--segment", "4096", "--threads",
            threads,
        ]);
        assert_eq!(out.status.code(), Some(0));
        // The config line embeds the thread count, so compare the data rows.
        let strip = |s: &Output| stdout_of(s).lines().skip(1).collect::<Vec<_>>().join("\n");
        assert_eq!(strip(&base), strip(&out), "threads = {threads}");
    }
}

#[test]
fn config_line_round_trips_canonically() {
    let out = run(&["abc", "--limit", "1000", "--bound", "const:5", "--top", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let config_line = text.lines().next().unwrap();
    let json = config_line.strip_prefix("# config=").expect("config comment first");
    let cfg: RunConfig = serde_json::from_str(json).expect("config parses");
    assert_eq!(cfg.canonical(), json, "canonical form must round trip");
    assert_eq!(cfg.command, "abc");
    assert_eq!(cfg.top, Some(4));
}

#[test]
fn abc_rows_use_documented_schema() {
    let out = run(&["abc", "--limit", "200", "--bound", "const:5", "--top", "2"]);
    let text = stdout_of(&out);
    let mut lines = text.lines().skip(1);
    assert_eq!(lines.next().unwrap(), "n_i,n_next,g,a,b,c,radical,quality");
    let first = lines.next().unwrap();
    assert!(first.starts_with("125,128,1,125,3,128,30,1.4265653"), "got {first}");
}

#[test]
fn step_table_bound_comes_from_file() {
    let dir = std::env::temp_dir().join(format!("smoothgaps-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("steps.csv");
    std::fs::write(&path, "# threshold,value\n1,3\n50,5\n").unwrap();
    let out = run(&["sequence", "--bound", &format!("step:{}", path.display()), "--limit", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let terms: Vec<u64> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    // Below 50 the bound is 3; from 50 on it is 5.
    assert!(terms.contains(&48));
    assert!(!terms.contains(&40)); // 40 = 2^3 * 5 fails the early bound 3
    assert!(terms.contains(&50)); // 50 = 2 * 5^2 passes once the step lifts
    assert!(terms.contains(&60));
    // The canonical config embeds the parsed table.
    let cfg: RunConfig =
        serde_json::from_str(text.lines().next().unwrap().strip_prefix("# config=").unwrap())
            .unwrap();
    assert_eq!(cfg.bound, "step");
    assert_eq!(cfg.step_table, Some(vec![(1.0, 3.0), (50.0, 5.0)]));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn threads_env_var_is_the_fallback() {
    let out = bin()
        .env("SMOOTHGAPS_THREADS", "3")
        .args(["sequence", "--limit", "100"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg: RunConfig =
        serde_json::from_str(text.lines().next().unwrap().strip_prefix("# config=").unwrap())
            .unwrap();
    assert_eq!(cfg.threads, 3);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = std::env::temp_dir().join(format!("smoothgaps-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gaps.csv");
    let out = run(&["gaps", "--limit", "13", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() >= 9);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_command_pairs_gaps_with_bound_curves() {
    let out = run(&["report", "--bound", "const:5", "--limit", "1000", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["type"], "report");
        rows += 1;
        if v["n_i"].as_u64().unwrap() >= 16 {
            assert!(v["kappa"].is_number());
            assert!(v["gap_lower_log"].is_number());
            assert_eq!(v["c_too_small"], false);
        }
    }
    assert!(rows > 20);
}

#[test]
fn bounds_table_covers_pair_diagnostics() {
    let out = run(&["bounds", "--n", "80", "--t", "1", "--bound", "const:5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for quantity in [
        "gap_lower_log",
        "gap_upper_log",
        "constructive_bound_log",
        "abc_lower_log",
        "lambda",
        "matveev_lower",
        "chain_holds,true",
        "lambda_consistent,true",
        "abc_holds,true",
        "primorial_margin",
    ] {
        assert!(text.contains(quantity), "missing {quantity} in:\n{text}");
    }
    // A pair with a factor beyond the bound is a not-smooth error, exit 1.
    let out = run(&["bounds", "--n", "13", "--t", "1", "--bound", "const:5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gap_stats_report_dyadic_and_histogram() {
    let out = run(&["gaps", "--bound", "const:5", "--limit", "2000", "--stats"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("stat,max_kappa_n_i,80,"));
    assert!(text.contains("dyadic,6,"));
    let hist_total: u64 = text
        .lines()
        .filter(|l| l.starts_with("hist,"))
        .map(|l| l.split(',').nth(2).unwrap().parse::<u64>().unwrap())
        .sum();
    let records: u64 = text
        .lines()
        .find(|l| l.starts_with("stat,records,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .unwrap();
    assert_eq!(hist_total, records);
}
