use std::path::Path;
use std::process::{Command, Output};

use lpsens::generate::gaussian;
use lpsens_cli::bench::CSV_HEADER;
use lpsens_cli::report::SensitivityReport;

fn lpsens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpsens")).args(args).output().expect("binary runs")
}

fn write_matrix(path: &Path, rows: impl Iterator<Item = Vec<f64>>) {
    let body: String = rows
        .map(|r| r.iter().map(f64::to_string).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(path, body).unwrap();
}

fn toy(dir: &Path) -> String {
    let path = dir.join("toy.csv");
    std::fs::write(&path, "x,y\n1,0\n0,1\n1,1\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn exact_on_toy_matrix_totals_one_and_a_half() {
    let dir = tempfile::tempdir().unwrap();
    let input = toy(dir.path());
    let out = dir.path().join("r.json");
    let res = lpsens(&["exact", "--input", &input, "--p", "1", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report = SensitivityReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((report.total.unwrap() - 1.5).abs() < 1e-9);
    for v in report.per_row.unwrap() {
        assert!((v - 0.5).abs() < 1e-9);
    }
    assert!(report.metrics.is_none());
    assert!(String::from_utf8_lossy(&res.stdout).contains("total estimate"));
}

#[test]
fn total_l2_is_near_rank() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    let a = gaussian(300, 5, 12);
    write_matrix(&path, a.rows().map(<[f64]>::to_vec));
    let out = dir.path().join("r.json");
    let res = lpsens(&[
        "total", "--input", path.to_str().unwrap(), "--method", "lewis_oneshot", "--p", "2", "--gamma", "0.2",
        "--exact", "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report = SensitivityReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let est = report.total.unwrap();
    assert!(est > 5.0 / 1.5 && est < 5.0 * 1.5, "estimate {est}");
    assert!((report.oracle.unwrap().total - 5.0).abs() < 1e-6);
    assert!(report.metrics.is_some());
}

#[test]
fn bench_emits_four_row_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let res = lpsens(&["bench", "--p-list", "1,1.5,2.5,3", "--rows", "60", "--cols", "4", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    let first: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(first[0], 1.0);
    assert_eq!(first[1], 4.0);
    assert!(String::from_utf8_lossy(&res.stdout).contains("ratio"));
}

#[test]
fn all_writes_csv_report_and_alpha_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    write_matrix(&path, gaussian(40, 2, 3).rows().map(<[f64]>::to_vec));
    let out = dir.path().join("r.csv");
    let series = dir.path().join("series.csv");
    let res = lpsens(&[
        "all", "--input", path.to_str().unwrap(), "--alpha", "4", "--repetitions", "1", "--constants",
        "signs_per_block=5", "--exact", "--alpha-list", "2,8", "--series-out", series.to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.starts_with("field,value\ncommand,all\n"));
    assert!(report.contains("config.constants.signs_per_block,5\n"));
    assert!(report.contains("metrics.mean_abs_log_ratio,"));
    let series = std::fs::read_to_string(&series).unwrap();
    assert_eq!(series.lines().count(), 3);
    assert!(series.starts_with("alpha,mean_abs_log_ratio,max_abs_log_ratio,oracle_calls\n2,"));
}

#[test]
fn reduce_reports_regression_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    // Third column equals the sum of the first two, so the target is fit exactly.
    let a = gaussian(20, 2, 5);
    write_matrix(&path, a.rows().map(|r| vec![r[0], r[1], r[0] + r[1]]));
    let out = dir.path().join("r.json");
    let res = lpsens(&["reduce", "--input", path.to_str().unwrap(), "--target-column", "2", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report = SensitivityReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let reg = report.regression.unwrap();
    assert!(reg.opt.unwrap().abs() < 1e-8);
    assert_eq!(reg.leave_one_out.len(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = toy(dir.path());
    assert_eq!(lpsens(&["--help"]).status.code(), Some(0));
    assert_eq!(lpsens(&["exact", "--input", &input, "--bogus"]).status.code(), Some(1));
    assert_eq!(lpsens(&["exact"]).status.code(), Some(1));
    assert_eq!(lpsens(&["exact", "--input", "/nonexistent.csv"]).status.code(), Some(1));
    assert_eq!(
        lpsens(&["total", "--input", &input, "--method", "recursive_l1", "--p", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(lpsens(&["exact", "--input", &input, "--out", "r.txt"]).status.code(), Some(1));
    assert_eq!(lpsens(&["max", "--input", &input, "--constants", "nope=1"]).status.code(), Some(1));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3,oops\n").unwrap();
    let res = lpsens(&["exact", "--input", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 2, column 2"));
}

#[test]
fn non_convergence_maps_to_exit_code_two() {
    let e = anyhow::Error::new(lpsens::Error::NonConvergence { iterations: 5, residual: 0.1 }).context("while estimating");
    assert_eq!(lpsens_cli::exit_code(&e), 2);
    assert_eq!(lpsens_cli::exit_code(&anyhow::anyhow!("bad input")), 1);
}
