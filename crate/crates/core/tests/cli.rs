use std::path::Path;
use std::process::{Command, Output};

use disc_hitting::harness::{parse_grid, EnvelopeConstants, COMPARISON_COLUMNS};
use disc_hitting::VERSION;
use proptest::prelude::*;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_disc-hitting"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_body(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("# disc-hitting {VERSION}"));
    let header: Vec<String> = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn eval_w_all_methods_agree() {
    let o = run(&[
        "eval-w", "--lambda", "1e6", "--method", "all", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["meta"]["version"], VERSION);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let vals: Vec<f64> = rows.iter().map(|r| r["value"].as_f64().unwrap()).collect();
    for &w in &vals[..3] {
        assert!((w - vals[0]).abs() < 1e-7);
    }
    // the asymptotic row is within its own error estimate
    assert!((vals[3] - vals[0]).abs() <= rows[3]["error_estimate"].as_f64().unwrap() * 3.0);
}

#[test]
fn compare_schema() {
    let o = run(&[
        "compare",
        "--r",
        "1",
        "--x",
        "10",
        "--t-grid",
        "1e2:1e6:log10",
        "--suite",
        "thm1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_body(&stdout(&o));
    assert_eq!(header, COMPARISON_COLUMNS);
    assert_eq!(rows.len(), 10);
    for row in &rows {
        assert_eq!(row.len(), COMPARISON_COLUMNS.len());
        // MC columns empty without --mc-paths
        assert!(row[6].is_empty() && row[7].is_empty());
        assert!(row[8].parse::<f64>().unwrap() >= 0.0);
        for cell in [&row[0], &row[3], &row[4], &row[5]] {
            assert!(cell.parse::<f64>().unwrap().is_finite());
        }
    }
    let ts: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ts, parse_grid("1e2:1e6:log10").unwrap());
}

#[test]
fn compare_with_monte_carlo_columns() {
    let o = run(&[
        "compare",
        "--x",
        "2",
        "--t-grid",
        "2:20:log2",
        "--suite",
        "thm3",
        "--mc-paths",
        "2000",
        "--seed",
        "4",
    ]);
    assert!(o.status.success());
    let (_, rows) = csv_body(&stdout(&o));
    for row in rows {
        let mc: f64 = row[6].parse().unwrap();
        let se: f64 = row[7].parse().unwrap();
        let exact: f64 = row[3].parse().unwrap();
        assert!((mc - exact).abs() < 4.0 * se);
    }
}

#[test]
fn mc_run_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = ["a.csv", "b.csv", "c.csv"]
        .iter()
        .map(|f| dir.path().join(f))
        .collect();
    for (path, workers) in files.iter().zip(["1", "4", "7"]) {
        let o = bin()
            .env("WORKERS", workers)
            .args([
                "mc-run", "--r", "1", "--x", "2", "--paths", "100000", "--seed", "7", "-o",
            ])
            .arg(path)
            .output()
            .unwrap();
        assert!(o.status.success());
    }
    let a = std::fs::read(&files[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&files[1]).unwrap());
    assert_eq!(a, std::fs::read(&files[2]).unwrap());
}

#[test]
fn csv_values_round_trip() {
    let o = run(&["eval-density", "--r", "1", "--x", "2", "--t", "0.3:30:log4"]);
    let (_, rows) = csv_body(&stdout(&o));
    for row in rows {
        let t: f64 = row[0].parse().unwrap();
        let v: f64 = row[3].parse().unwrap();
        let q = disc_hitting::hitting_density::HittingQuery::new(1.0, 2.0, t).unwrap();
        let direct =
            disc_hitting::hitting_density::density_branchcut(q, &Default::default()).unwrap();
        assert_eq!(v.to_bits(), direct.value.to_bits());
    }
}

#[test]
fn validation_failures_exit_2() {
    let cases: [&[&str]; 8] = [
        &["no-such-command"],
        &[],
        &["eval-density", "--r", "2", "--x", "1", "--t", "1"],
        &["eval-density", "--r", "1", "--x", "2", "--t", "1:0:log3"],
        &["eval-w", "--lambda", "-3"],
        &["mc-run", "--r", "1", "--x", "2", "--step-scale", "2"],
        &[
            "eval-asymptotic",
            "--x",
            "2",
            "--t",
            "0.5",
            "--formula",
            "thm1",
        ],
        &["compare", "--x", "2", "--t-grid", "abc"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = bin()
        .env("WORKERS", "zero")
        .args(["eval-w", "--lambda", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn calibration_sanity_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let o = bin()
        .args(["calibrate", "--t-grid", "1.5", "--x-grid", "50", "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(!path.exists());
}

fn calibrate_to(path: &Path, force: bool) -> Output {
    let mut c = bin();
    c.args(["calibrate", "-o"]).arg(path);
    if force {
        c.arg("--force");
    }
    c.output().unwrap()
}

#[test]
fn calibration_file_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.json");
    assert!(calibrate_to(&path, false).status.success());
    let first = EnvelopeConstants::load(&path).unwrap();

    let before = std::fs::read(&path).unwrap();
    assert_eq!(calibrate_to(&path, false).status.code(), Some(2));
    assert_eq!(std::fs::read(&path).unwrap(), before);

    assert!(calibrate_to(&path, true).status.success());
    let second = EnvelopeConstants::load(&path).unwrap();
    for (a, b) in [
        (first.w_leading, second.w_leading),
        (first.heat_kernel, second.heat_kernel),
        (first.e1_cdf, second.e1_cdf),
        (first.regime_agreement, second.regime_agreement),
    ] {
        assert!((a - b).abs() <= 1e-10 * a.abs());
    }
    assert!(second.w_leading > 0.0 && second.w_leading < 100.0);

    // shipped constants match a fresh calibration
    let frozen = EnvelopeConstants::frozen();
    assert!((frozen.e1_cdf - second.e1_cdf).abs() <= 1e-10 * frozen.e1_cdf);

    let copy = dir.path().join("copy.json");
    second.save(&copy, false).unwrap();
    assert_eq!(EnvelopeConstants::load(&copy).unwrap(), second);
    assert!(second.save(&copy, false).is_err());
}

proptest! {
    #[test]
    fn grid_shape(a in 1e-3f64..10.0, span in 1.5f64..1e4, n in 2usize..60, log in any::<bool>()) {
        let b = a * span;
        let text = format!("{a:?}:{b:?}:{}{n}", if log { "log" } else { "lin" });
        let g = parse_grid(&text).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert_eq!(g[0], a);
        prop_assert_eq!(g[n - 1], b);
        for w in g.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
    }
}
