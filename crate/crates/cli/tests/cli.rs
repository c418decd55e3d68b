use std::path::Path;
use std::process::{Command, Output};

use scalarspec_cli::RunReport;

fn scalarspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scalarspec"))
        .args(args)
        .env("SCALARSPEC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn passing_runs_exit_zero() {
    let out = scalarspec(&["verify", "--family", "clifford", "--n", "5", "--m", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,case,n,m,c_or_r,quantity,value,bound_or_target,slack,tolerance,pass\n"));
    let t14 = text.lines().find(|l| l.contains(",T1.4 equality,")).unwrap();
    let slack: f64 = t14.split(',').nth(8).unwrap().parse().unwrap();
    assert!(slack.abs() < 1e-10);
}

#[test]
fn failed_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "strict.json", r#"{"tolerances": {"discrete": 1e-12}}"#);
    let out = scalarspec(&[
        "sweep", "--suite", "discrete", "--n", "5", "--m", "1", "--grid", "64,128", "--config", &config,
    ]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.contains("lambda2 finest") && l.ends_with(",false")));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"n_min\": ");
    let unknown = write(dir.path(), "unknown.json", r#"{"tolerances": {"nonsense": 1.0}}"#);
    let cases: Vec<Vec<&str>> = vec![
        vec!["frobnicate"],
        vec!["verify", "--n", "five"],
        vec!["verify", "--family", "umbilical", "--n", "5"],
        vec!["verify", "--family", "umbilical", "--n", "5", "--r", "0.5"],
        vec!["spectra", "--n", "5", "--m", "1", "--c", "1.5"],
        vec!["sweep", "--suite", "bounds", "--n", "2"],
        vec!["sweep", "--suite", "bounds", "--config", &broken],
        vec!["sweep", "--suite", "bounds", "--config", &unknown],
        vec!["center", "--n", "5", "--resolution", "7"],
    ];
    for args in cases {
        let out = scalarspec(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_scalarspec"))
        .args(["sweep", "--suite", "identities", "--n", "5"])
        .env("SCALARSPEC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing_dir = dir.path().join("no/such/dir/report.csv");
    let out = scalarspec(&["spectra", "--n", "5", "--out", missing_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let missing_config = dir.path().join("absent.json");
    let out = scalarspec(&["sweep", "--suite", "bounds", "--config", missing_config.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "sweep.json",
        r#"{"n_min": 5, "n_max": 6, "resolution": 32, "grid_sizes": [64, 128], "seed": 7}"#,
    );
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for (path, threads) in [(&first, "1"), (&second, "3")] {
        let out = Command::new(env!("CARGO_BIN_EXE_scalarspec"))
            .args(["sweep", "--suite", "all", "--config", &config, "--out", path.to_str().unwrap()])
            .env("SCALARSPEC_THREADS", threads)
            .output()
            .unwrap();
        assert!(matches!(code(&out), 0 | 1));
    }
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn json_output_round_trips_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", r#"{"n_min": 5, "n_max": 9, "r_list": [2.0]}"#);
    let path = dir.path().join("report.json");
    let out = scalarspec(&[
        "sweep", "--suite", "bounds", "--config", &config, "--n", "6", "--m", "2", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let report: RunReport = serde_json::from_str(&text).unwrap();
    assert!(report.pass);
    assert!(report.rows.iter().all(|r| r.n == 6));
    assert!(report.rows.iter().any(|r| r.case == "umbilical" && r.c_or_r == Some(2.0)));
    assert!(report.rows.iter().any(|r| r.m == Some(2)));
    assert!(report.rows.iter().all(|r| r.m.is_none() || r.m == Some(2)));
    assert_eq!(scalarspec_cli::report::to_json(&report), text);
}

#[test]
fn center_and_discrete_subcommands() {
    let out = scalarspec(&["center", "--n", "5", "--m", "1", "--resolution", "64", "--tol", "1e-8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let out = scalarspec(&["discrete", "--n", "5", "--m", "1", "--grid", "200,400,800"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let order = text.lines().find(|l| l.contains("observed order")).unwrap();
    let value: f64 = order.split(',').nth(6).unwrap().parse().unwrap();
    assert!((value - 2.0).abs() < 0.3);
}
