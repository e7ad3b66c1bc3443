//! End-to-end tests running the compiled binary: exit codes, trace files,
//! determinism, and the reference-table reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sefpp_cli::config;
use sefpp_cli::export::{self, ExportFormat, TraceRow};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sefpp"))
}

fn sample_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/p1.toml")
}

/// Runs the binary with SEFPP_OUT_DIR pointing at `dir`, so relative output
/// paths from configs land in the test's own temp directory.
fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("SEFPP_OUT_DIR", dir)
        .output()
        .expect("binary should run")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

const P1_PROBLEM: &str = r#"
[problem]
d1 = [[0.5]]
d2 = [[0.3333333333333333]]
x0 = [0.0]
y0 = [0.0]

[problem.t1]
kind = "affine"
scale = 0.5
offset = [2.0]

[problem.t2]
kind = "affine"
scale = 0.5
offset = [3.0]
"#;

fn write_config(dir: &Path, solver: &str, output: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, format!("{P1_PROBLEM}\n{solver}\n{output}\n")).unwrap();
    path
}

fn csv_output(path: &str) -> String {
    format!("[output]\nformat = \"csv\"\npath = \"{path}\"")
}

fn read_rows(path: &Path, format: ExportFormat) -> Vec<TraceRow> {
    let text = fs::read_to_string(path).unwrap();
    export::parse(&text, format).unwrap()
}

#[test]
fn run_converges_and_logs_a_monotone_distance_column() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(dir.path(), &["run", sample_config().to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("converged within tolerance"), "{text}");
    assert!(text.contains("final residuals"), "{text}");

    let trace_path = dir.path().join("p1_trace.csv");
    let raw = fs::read_to_string(&trace_path).unwrap();
    assert!(
        raw.starts_with("n,x1,y1,coupling,fix_x,fix_y,gamma,k_norm,r_norm\n"),
        "unexpected header: {}",
        raw.lines().next().unwrap()
    );

    let rows = read_rows(&trace_path, ExportFormat::Csv);
    assert_eq!(rows[0].n, 1);
    assert_eq!(rows[0].x, vec![0.0]);
    let gammas: Vec<f64> = rows
        .iter()
        .map(|r| r.gamma.expect("known solution logs gamma"))
        .collect();
    for pair in gammas.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "gamma rose: {pair:?}");
    }
    assert!(
        rows.iter()
            .all(|r| r.k_norm.is_none() && r.r_norm.is_none())
    );
}

#[test]
fn reruns_are_byte_identical() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let config = sample_config();
    for dir in [first.path(), second.path()] {
        let output = run_in(dir, &["run", config.to_str().unwrap()]);
        assert_eq!(code(&output), 0);
    }
    let a = fs::read(first.path().join("p1_trace.csv")).unwrap();
    let b = fs::read(second.path().join("p1_trace.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn exported_digits_match_the_solver_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(dir.path(), &["run", sample_config().to_str().unwrap()]);
    assert_eq!(code(&output), 0);

    let loaded = config::load_run(&sample_config()).unwrap();
    let trace = sefpp::solve(&loaded.problem, &loaded.solver).unwrap();
    let expected = export::select_rows(&trace, loaded.output.log_every_k);

    let written = read_rows(&dir.path().join("p1_trace.csv"), ExportFormat::Csv);
    assert_eq!(written, expected);
}

#[test]
fn json_lines_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let solver = r#"
[solver]
mode = "known-norm"
alpha = { kind = "constant", value = 0.5 }
tau = { kind = "harmonic", scale = 1.0 }
known_solution = { p = [4.0], q = [6.0] }
"#;
    let output_block = "[output]\nformat = \"json-lines\"\npath = \"trace.jsonl\"";
    let config_path = write_config(dir.path(), solver, output_block);
    let output = run_in(dir.path(), &["run", config_path.to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));

    let loaded = config::load_run(&config_path).unwrap();
    let trace = sefpp::solve(&loaded.problem, &loaded.solver).unwrap();
    let expected = export::select_rows(&trace, 1);

    let written = read_rows(&dir.path().join("trace.jsonl"), ExportFormat::JsonLines);
    assert_eq!(written, expected);
}

#[test]
fn norm_free_runs_fill_the_direction_columns() {
    let dir = tempfile::tempdir().unwrap();
    let solver = r#"
[solver]
mode = "norm-free"
alpha = { kind = "constant", value = 0.5 }
tau = { kind = "power", scale = 0.9, exponent = 0.75 }
stop_tolerance = 1e-5
"#;
    let config_path = write_config(dir.path(), solver, &csv_output("nf.csv"));
    let output = run_in(dir.path(), &["run", config_path.to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));

    let rows = read_rows(&dir.path().join("nf.csv"), ExportFormat::Csv);
    assert!(
        rows.iter()
            .all(|r| r.k_norm.is_some() && r.r_norm.is_some())
    );
    assert!(rows.iter().all(|r| r.gamma.is_none()));
}

#[test]
fn constant_steps_need_an_override_in_known_norm_mode() {
    let dir = tempfile::tempdir().unwrap();
    let solver = r#"
[solver]
mode = "known-norm"
alpha = { kind = "constant", value = 0.5 }
tau = { kind = "constant", value = 0.1 }
"#;
    let config_path = write_config(dir.path(), solver, &csv_output("ks.csv"));
    let output = run_in(dir.path(), &["run", config_path.to_str().unwrap()]);
    assert_eq!(code(&output), 1);
    assert!(
        stderr(&output).contains("must vanish"),
        "{}",
        stderr(&output)
    );

    let overridden = format!("{solver}parameter_override = true\n");
    let config_path = write_config(dir.path(), &overridden, &csv_output("ks.csv"));
    let output = run_in(dir.path(), &["run", config_path.to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert!(
        stderr(&output).contains("overridden"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn mismatched_dimensions_are_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let solver = r#"
[solver]
mode = "known-norm"
alpha = { kind = "constant", value = 0.5 }
tau = { kind = "harmonic", scale = 1.0 }
"#;
    let config_path = write_config(dir.path(), solver, &csv_output("bad.csv"));
    let text = fs::read_to_string(&config_path).unwrap();
    fs::write(&config_path, text.replace("x0 = [0.0]", "x0 = [0.0, 0.0]")).unwrap();

    let output = run_in(dir.path(), &["run", config_path.to_str().unwrap()]);
    assert_eq!(code(&output), 1);
    assert!(
        stderr(&output).contains("D1 domain vs x0"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn exhausted_budgets_exit_two_and_thinning_keeps_the_last_row() {
    let dir = tempfile::tempdir().unwrap();
    let solver = r#"
[solver]
mode = "known-norm"
alpha = { kind = "constant", value = 0.5 }
tau = { kind = "harmonic", scale = 1.0 }
stop_tolerance = 0.0
max_iters = 25
"#;
    let output_block = "[output]\nformat = \"csv\"\npath = \"short.csv\"\nlog_every_k = 10";
    let config_path = write_config(dir.path(), solver, output_block);
    let output = run_in(dir.path(), &["run", config_path.to_str().unwrap()]);
    assert_eq!(code(&output), 2, "stderr: {}", stderr(&output));
    assert!(
        stdout(&output).contains("iteration budget"),
        "{}",
        stdout(&output)
    );

    // 26 records at n = 1..=26; positions 0, 10, 20 plus the forced last.
    let rows = read_rows(&dir.path().join("short.csv"), ExportFormat::Csv);
    let indices: Vec<usize> = rows.iter().map(|r| r.n).collect();
    assert_eq!(indices, vec![1, 11, 21, 26]);
}

#[test]
fn validate_accepts_the_sample_config() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(dir.path(), &["validate", sample_config().to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("ok:"), "{text}");
    assert!(text.contains("known solution verified"), "{text}");
    assert!(
        dir.path().read_dir().unwrap().next().is_none(),
        "validate wrote files"
    );
}

#[test]
fn validate_locates_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let solver = r#"
[solver]
mode = "known-norm"
alpha = { kind = "constant", value = 0.5 }
tau = { kind = "harmonic", scale = 1.0 }
stop_tol = 1e-6
"#;
    let config_path = write_config(dir.path(), solver, &csv_output("x.csv"));
    let output = run_in(dir.path(), &["validate", config_path.to_str().unwrap()]);
    assert_eq!(code(&output), 1);
    let text = stderr(&output);
    assert!(text.contains("stop_tol"), "{text}");
    assert!(text.contains("line"), "{text}");
}

#[test]
fn missing_config_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(dir.path(), &["run", "no_such_file.toml"]);
    assert_eq!(code(&output), 1);
    assert!(stderr(&output).contains("no_such_file.toml"));
}

#[test]
fn reproduce_tables_one_passes() {
    let output = bin().args(["reproduce-tables", "1"]).output().unwrap();
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("reference table 1"), "{text}");
    assert!(
        text.contains("result: PASS (4 of 4 checks within tolerance)"),
        "{text}"
    );
}

#[test]
fn reproduce_tables_two_reports_without_asserting() {
    let output = bin().args(["reproduce-tables", "2"]).output().unwrap();
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("no pinned values"), "{text}");
    assert!(text.contains("result: REPORT"), "{text}");
    assert!(text.contains("n=100"), "{text}");
}

#[test]
fn reproduce_tables_rejects_unknown_ids() {
    let output = bin().args(["reproduce-tables", "3"]).output().unwrap();
    assert_eq!(code(&output), 2);
    assert!(
        stderr(&output).contains("invalid value"),
        "{}",
        stderr(&output)
    );
}
