use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tribowave"));
    cmd.args(args).env_remove("TRIBOWAVE_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Report rows as field vectors, from the header on.
fn report_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip_while(|l| !l.starts_with("problem,"))
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn field(row: &[String], name: &str) -> String {
    let header = "problem,k,M,max_abs_error,max_residual,iterations,wall_time_ms,condition_estimate,grid_size";
    let i = header.split(',').position(|h| h == name).unwrap();
    row[i].clone()
}

/// Drops the wall-clock column, the one field that varies between runs.
fn without_timing(text: &str) -> String {
    text.lines()
        .map(|l| {
            let mut cells: Vec<&str> = l.split(',').collect();
            if cells.len() == 9 {
                cells.remove(6);
            }
            cells.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn list_names_the_six_problems() {
    let o = run(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text.contains("lane-emden-5"));

    let o = run(&["list", "--json"]);
    let items: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = items
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "lane-emden-5",
            "thermal-explosion",
            "membrane-cap",
            "efte-first",
            "efte-second",
            "perturbation"
        ]
    );
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["list", "extra-arg"][..],
        &["list", "--bogus"],
        &["approx", "cosine"],
        &["solve", "bratu"],
        &["solve", "lane-emden-5", "--eps", "0.1"],
        &["solve", "lane-emden-5", "--M", "0"],
        &["sweep", "thermal-explosion"],
        &["bench", "--only", "nothing"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

fn coefficients(text: &str) -> Vec<f64> {
    text.lines()
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn approx_prints_coefficients_then_grid() {
    let o = run(&["approx", "sinc", "--k", "1", "--M", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let c = coefficients(&text);
    assert_eq!(c.len(), 5);
    assert!((c[0] - 0.99101).abs() < 1e-3, "{}", c[0]);
    assert!(text.contains("t,g,approx,abs_error"));

    let c = coefficients(&stdout(&run(&["approx", "tlogt", "--k", "1", "--M", "7"])));
    assert_eq!(c.len(), 7);

    let c = coefficients(&stdout(&run(&["approx", "sinc", "--k", "2", "--M", "3"])));
    assert_eq!(c.len(), 6);
}

#[test]
fn solve_reports_published_accuracy() {
    let o = run(&["solve", "lane-emden-5", "--M", "8"]);
    assert!(o.status.success());
    let rows = report_rows(&stdout(&o));
    let err: f64 = field(&rows[0], "max_abs_error").parse().unwrap();
    assert!(err <= 1e-6, "{err}");

    let o = run(&["solve", "perturbation", "--eps", "0.03125", "--M", "14"]);
    let rows = report_rows(&stdout(&o));
    let err: f64 = field(&rows[0], "max_abs_error").parse().unwrap();
    assert!(err <= 1e-7, "{err}");

    let o = run(&["solve", "membrane-cap", "--M", "5"]);
    let rows = report_rows(&stdout(&o));
    assert_eq!(field(&rows[0], "max_abs_error"), "");
    let res: f64 = field(&rows[0], "max_residual").parse().unwrap();
    assert!(res <= 1e-6, "{res}");
}

#[test]
fn non_convergence_exits_three_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.csv");
    let o = run(&[
        "solve",
        "lane-emden-5",
        "--M",
        "6",
        "--max-iter",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let body = fs::read_to_string(&out).unwrap();
    assert!(body.starts_with('#'));
    assert_eq!(body.lines().nth(1), Some("t,exact,approx,abs_error"));
}

#[test]
fn sweep_rows_follow_m_order() {
    let o = run(&["sweep", "thermal-explosion", "--M", "2,4,6,8,9"]);
    assert!(o.status.success());
    let rows = report_rows(&stdout(&o));
    let ms: Vec<String> = rows.iter().map(|r| field(r, "M")).collect();
    assert_eq!(ms, ["2", "4", "6", "8", "9"]);
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let args = ["sweep", "efte-second", "--M", "4,5,7"];
    let serial = without_timing(&stdout(&run(&args)));
    assert_eq!(serial, without_timing(&stdout(&run(&args))));
    let threaded = without_timing(&stdout(&run_env(&args, &[("TRIBOWAVE_THREADS", "4")])));
    assert_eq!(serial, threaded);
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn bench_writes_one_file_per_problem_plus_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "bench",
        "--only",
        "lane-emden-5",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.code().is_some());
    assert_eq!(files_in(dir.path()), ["lane-emden-5.csv", "summary.csv"]);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    assert_eq!(lines.next(), Some("problem,M,check,value,limit,published,pass"));
    let any_fail = summary.contains(",FAIL");
    assert_eq!(o.status.success(), !any_fail);

    let full = tempfile::tempdir().unwrap();
    let o = run(&["bench", "--out-dir", full.path().to_str().unwrap()]);
    assert!(o.status.code().is_some());
    assert_eq!(files_in(full.path()).len(), 7);
}

#[test]
fn sweep_out_file_is_replaced_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    fs::write(&out, "stale").unwrap();
    let o = run(&["sweep", "membrane-cap", "--M", "4,5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(files_in(dir.path()), ["table.csv"]);
    let body = fs::read_to_string(&out).unwrap();
    assert_eq!(body.lines().filter(|l| !l.starts_with('#')).count(), 3);
    assert!(o.stdout.is_empty());
}
