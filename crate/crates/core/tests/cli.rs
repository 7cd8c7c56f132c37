use std::path::Path;
use std::process::{Command, Output};

use lieflow::experiments::{records_csv, run_sweep, tau_grid, ExperimentConfig, ObservationKind, CSV_HEADER};

fn experiment(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_experiment"));
    cmd.args(args).env("RUST_LOG", "error");
    if let Some(out) = out {
        cmd.arg("--out").arg(out);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn writes_the_library_csv_and_a_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let run = experiment(
        &["--model", "group", "--n", "300", "--tau-min", "0.01", "--tau-max", "0.1", "--tau-points", "3", "--seed", "5", "--emit-gnuplot"],
        Some(&out),
    );
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 4);
    let cfg = ExperimentConfig {
        samples: 300,
        taus: tau_grid(0.01, 0.1, 3).unwrap(),
        ..ExperimentConfig::new(ObservationKind::Group, 5)
    };
    assert_eq!(csv, records_csv(&run_sweep(&cfg).unwrap()));

    let script = std::fs::read_to_string(dir.path().join("sweep.csv.gp")).unwrap();
    assert!(script.contains(out.to_str().unwrap()));
}

#[test]
fn wall_time_column_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("timed.csv");
    let args = ["--model", "euclidean", "--n", "200", "--tau-points", "2"];
    assert!(experiment(&args, Some(&out)).status.success());
    let untimed = std::fs::read_to_string(&out).unwrap();
    assert!(untimed.lines().skip(1).all(|l| l.ends_with(",0")));
    assert!(experiment(&[&args[..], &["--wall-time"]].concat(), Some(&out)).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), untimed.lines().count());
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("x.csv");
    let run = experiment(&["--model", "group", "--n", "50", "--tau-points", "1"], Some(&out));
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("x.csv"));
}

#[test]
fn bad_arguments_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(experiment(&["--model", "lie"], Some(&out)).status.code(), Some(2));
    assert_eq!(experiment(&["--model", "group"], None).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn invalid_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let run = experiment(&["--model", "group", "--tau-min", "1", "--tau-max", "0.1"], Some(&out));
    assert_eq!(run.status.code(), Some(1));
    assert!(!out.exists());
}
