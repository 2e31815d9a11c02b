//! End-to-end checks of the command-line binary: exit codes, output
//! schemas, determinism, and tolerance resolution.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zetapartial"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

// ---- exit codes ----

#[test]
fn success_exits_zero() {
    let out = run(&["verify", "--q", "4", "--x", "10", "--t", "100"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON verdict");
    assert_eq!(doc["q"], 4);
    assert_eq!(doc["X"], 10.0);
    assert_eq!(doc["T"], 100.0);
    assert_eq!(doc["lrz2_pass"], true);
    assert!(doc["count"].is_u64());
}

#[test]
fn usage_error_exits_one() {
    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 1);

    let out = run(&["count", "--q", "4"]); // missing --x and --t
    assert_eq!(code(&out), 1);
}

#[test]
fn domain_error_exits_one() {
    let out = run(&["count", "--q", "4", "--x", "1", "--t", "10"]);
    assert_eq!(code(&out), 1);
    assert!(
        stderr(&out).contains("domain error"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Usage"));
}

#[test]
fn counting_bound_violation_exits_two() {
    // X = 3 keeps only the n = 1 and n = 2 terms for q = 4, so the count
    // follows log 2 while the bound's main term uses log 3; by T = 40 the
    // gap exceeds X/2.
    let out = run(&["verify", "--q", "4", "--x", "3", "--t", "40"]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON verdict");
    assert_eq!(doc["lrz2_pass"], false);
    assert_eq!(doc["count"], 4);
}

#[test]
fn numerical_failure_exits_three() {
    // The phase T log n cannot be reduced accurately at T = 1e18.
    let out = run(&["eval", "--q", "4", "--x", "100", "--sigma", "1", "--t", "1e18"]);
    assert_eq!(code(&out), 3);
    assert!(
        stderr(&out).contains("numerical failure"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn io_failure_exits_four() {
    let out = run(&[
        "experiment",
        "--q",
        "4",
        "--x-grid",
        "5",
        "--t-grid",
        "10",
        "--format",
        "csv",
        "--output",
        "/nonexistent-dir-zetapartial/out.csv",
    ]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("I/O error"), "stderr: {}", stderr(&out));
}

#[test]
fn experiment_reports_worst_cell_exit() {
    // q = 5, X = 4 leaves only the constant term: the strip stage fails
    // informationally (no zeros exist, count 0 is correct), but the count
    // still misses the floor(X) main term by more than X/2, which is the
    // reportable bound violation.
    let out = run(&["experiment", "--q", "5", "--x-grid", "4", "--t-grid", "10", "--format", "csv"]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
}

// ---- output schemas ----

#[test]
fn experiment_csv_has_pinned_schema() {
    let out = run(&["experiment", "--q", "4", "--x-grid", "2", "--t-grid", "10", "--format", "csv"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("q,X,T,N,count,predicted,discrepancy,lrz2_bound,lrz2_pass,density_scale")
    );
    let row = lines.next().expect("one data row");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 10, "row: {row}");
    assert_eq!(fields[0], "4");
    assert_eq!(fields[4], "1"); // one zero below T = 10
    assert!(fields[8] == "true" || fields[8] == "false");
    // log log X is not positive at X = 2, so the scale column is empty.
    assert_eq!(fields[9], "");
    for f in [fields[1], fields[2], fields[5], fields[6], fields[7]] {
        f.parse::<f64>().unwrap_or_else(|_| panic!("unparsable float field {f:?}"));
    }
    assert!(lines.next().is_none(), "exactly one data row expected");
}

#[test]
fn experiment_json_mirrors_csv_names() {
    let out = run(&["experiment", "--q", "4", "--x-grid", "2,5", "--t-grid", "10,20", "--format", "json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON report");
    assert_eq!(doc["config"]["q"], 4);
    let cells = doc["cells"].as_array().expect("cells array");
    assert_eq!(cells.len(), 4);
    for cell in cells {
        for key in [
            "q", "X", "T", "N", "count", "predicted", "discrepancy", "lrz2_bound", "lrz2_pass",
        ] {
            assert!(!cell[key].is_null(), "cell missing {key}: {cell}");
        }
    }
    assert!(doc["bounds"].is_array());
    assert!(doc["density"].is_array());
    assert!(doc["brun"].is_array());
}

#[test]
fn zeros_csv_lists_located_zeros() {
    let out = run(&["zeros", "--q", "4", "--x", "2", "--t", "14", "--format", "csv"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,residual"));
    let rows: Vec<&str> = lines.collect();
    // 1 + 2^(-s) has zeros at (2m + 1) pi / log 2: two of them below 14.
    assert_eq!(rows.len(), 2);
    let first: Vec<f64> = rows[0].split(',').map(|f| f.parse().expect("float")).collect();
    let t0 = std::f64::consts::PI / 2f64.ln();
    assert!(first[0].abs() < 1e-9, "first zero off the imaginary axis: {}", rows[0]);
    assert!((first[1] - t0).abs() < 1e-9, "first zero at {} not {t0}", first[1]);
    assert!(first[2] < 1e-9);
}

#[test]
fn zeros_json_is_an_array() {
    let out = run(&["zeros", "--q", "4", "--x", "2", "--t", "14", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON zeros");
    let zeros = doc.as_array().expect("array");
    assert_eq!(zeros.len(), 2);
    assert!(zeros[0]["enclosure"]["sigma_lo"].is_number());
}

#[test]
fn count_json_uses_uppercase_names() {
    let out = run(&["count", "--q", "4", "--x", "2", "--t", "10"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON count");
    assert_eq!(doc["X"], 2.0);
    assert_eq!(doc["T"], 10.0);
    assert_eq!(doc["N"], 2);
    assert_eq!(doc["count"], 1);
    assert!(doc["density_scale"].is_null());
}

// ---- determinism ----

#[test]
fn experiment_output_is_deterministic() {
    let args = ["experiment", "--q", "3", "--x-grid", "5,10", "--t-grid", "15", "--format", "json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

// ---- tolerance resolution ----

#[test]
fn invalid_tolerance_env_is_rejected() {
    let out = bin()
        .args(["bounds", "--q", "4", "--x", "5"])
        .env("ZETAPARTIAL_TOL_RESIDUAL", "not-a-number")
        .output()
        .expect("binary runs");
    assert_eq!(code(&out), 1);
}

#[test]
fn tolerance_flag_overrides_bad_env() {
    let out = bin()
        .args(["bounds", "--q", "4", "--x", "5", "--tol-residual", "1e-9"])
        .env("ZETAPARTIAL_TOL_RESIDUAL", "not-a-number")
        .output()
        .expect("binary runs");
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
}

#[test]
fn nonpositive_tolerance_is_rejected() {
    let out = run(&["bounds", "--q", "4", "--x", "5", "--tol-newton", "0"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("domain error"), "stderr: {}", stderr(&out));
}

// ---- argument parsing regressions ----

#[test]
fn negative_numeric_arguments_parse() {
    let out = run(&["eval", "--q", "4", "--x", "2", "--sigma", "-0.5", "--t", "1"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON value");
    assert!(doc["re"].is_number() && doc["im"].is_number());
}

#[test]
fn hyphenated_range_argument_parses() {
    let out = run(&["imslice", "--q", "4", "--x", "5", "--t", "2", "--sigma-range", "-1:1:0.5"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sigma,im");
    assert_eq!(lines.len(), 6, "five grid points expected: {text}");
}

// ---- subcommand answers spot-checked against known values ----

#[test]
fn field_info_reports_ramification() {
    let out = run(&["field-info", "--q", "12"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON info");
    assert_eq!(doc["phi"], 4);
    let ramified = doc["ramified"].as_array().expect("ramified array");
    let ps: Vec<u64> = ramified.iter().map(|r| r["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, vec![2, 3]);
}

#[test]
fn brun_counts_restricted_squarefree_integers() {
    let out = run(&["brun", "--q", "4", "--y", "30"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON count");
    // {1, 5, 13, 17, 29}
    assert_eq!(doc["count"], 5);
}

#[test]
fn coeffs_prints_gaussian_table() {
    let out = run(&["coeffs", "--q", "4", "--x", "10", "--kind", "a"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,value"));
    let values: Vec<(u64, u64)> = lines
        .map(|l| {
            let (n, v) = l.split_once(',').expect("two fields");
            (n.parse().expect("n"), v.parse().expect("value"))
        })
        .collect();
    // Only the nonzero entries are listed.
    assert_eq!(
        values,
        vec![(1, 1), (2, 1), (4, 1), (5, 2), (8, 1), (9, 1), (10, 2)]
    );
}
