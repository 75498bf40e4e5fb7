mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::data_path;

fn urnchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urnchain"))
        .args(args)
        .output()
        .expect("failed to run urnchain")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(path).unwrap()
}

fn read_table(path: &Path) -> Vec<(String, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (key, p) = l.rsplit_once(',').unwrap();
            (key.to_string(), p.parse().unwrap())
        })
        .collect()
}

#[test]
fn simulate_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = data_path("example_scenario.conf");
    let schedule = data_path("example_schedule.csv");
    for (s, file) in [("0.05", "simulate_s005.csv"), ("0.01", "simulate_s001.csv")] {
        let out = dir.path().join(file);
        let res = urnchain(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--schedule",
            schedule.to_str().unwrap(),
            "--reinforcement",
            s,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        assert_eq!(fs::read_to_string(&out).unwrap(), golden(file));
    }
}

#[test]
fn simulate_group_a_month_six() {
    let res = urnchain(&[
        "simulate",
        "--config",
        data_path("example_scenario.conf").to_str().unwrap(),
        "--schedule",
        data_path("example_schedule.csv").to_str().unwrap(),
    ]);
    let stdout = String::from_utf8(res.stdout).unwrap();
    let row = stdout.lines().find(|l| l.starts_with("6,A,")).unwrap();
    let total: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((total - 0.0535).abs() < 1e-4);
}

#[test]
fn calibrate_matches_golden_and_anchors() {
    let config = data_path("example_scenario.conf");
    let res = urnchain(&["calibrate", "--config", config.to_str().unwrap()]);
    assert!(res.status.success());
    assert_eq!(String::from_utf8(res.stdout).unwrap(), golden("calibrate_m0.csv"));

    let res = urnchain(&["calibrate", "--config", config.to_str().unwrap(), "--month", "12"]);
    let text = String::from_utf8(res.stdout).unwrap();
    let totals: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(totals, ["0.019801", "0.058235", "0.086069"]);
}

#[test]
fn single_group_calibration_has_idio_equal_total() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one.conf");
    fs::write(&cfg, "[group.X]\nsize = 5\none_year_spread = 0.04\nreinforcement = 0.1\n").unwrap();
    let res = urnchain(&["calibrate", "--config", cfg.to_str().unwrap(), "--month", "3"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[2], fields[3]);
}

#[test]
fn empty_schedule_reports_month_zero() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("empty.csv");
    fs::write(&sched, "month,A,B,C\n").unwrap();
    let res = urnchain(&[
        "simulate",
        "--config",
        data_path("example_scenario.conf").to_str().unwrap(),
        "--schedule",
        sched.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.starts_with("0,")));
    assert!(String::from_utf8(res.stderr).unwrap().contains("group A: size 20"));
}

#[test]
fn overflowing_schedule_exits_with_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("over.csv");
    fs::write(&sched, "month,A,B,C\n1,15,0,0\n2,6,0,0\n").unwrap();
    let res = urnchain(&[
        "simulate",
        "--config",
        data_path("example_scenario.conf").to_str().unwrap(),
        "--schedule",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn decreasing_spreads_exit_with_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(
        &cfg,
        "[group.A]\nsize = 5\none_year_spread = 0.05\nreinforcement = 0.1\n\
         [group.B]\nsize = 5\none_year_spread = 0.02\nreinforcement = 0.1\n",
    )
    .unwrap();
    let res = urnchain(&["calibrate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "months = 12\n[group.A]\nsize = 5\none_year_spread = abc\n").unwrap();
    let res = urnchain(&["calibrate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8(res.stderr).unwrap().contains("bad.conf:4:"));

    let sched = dir.path().join("bad.csv");
    fs::write(&sched, "month,A,B,C\n1,0,0,0\n2,0,x,0\n").unwrap();
    let res = urnchain(&[
        "simulate",
        "--config",
        data_path("example_scenario.conf").to_str().unwrap(),
        "--schedule",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8(res.stderr).unwrap().contains("bad.csv:3:"));
}

#[test]
fn pmf_from_scenario_prior_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let res = urnchain(&[
        "pmf",
        "--config",
        data_path("example_scenario.conf").to_str().unwrap(),
        "--sizes",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    // three groups in the config but one size
    assert_eq!(res.status.code(), Some(2));

    let res = urnchain(&[
        "pmf",
        "--config",
        data_path("example_scenario.conf").to_str().unwrap(),
        "--sizes",
        "20,0,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let total: f64 = read_table(&out).iter().map(|(_, p)| p).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn exact_and_quadrature_modes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let exact = dir.path().join("exact.csv");
    let quad = dir.path().join("quad.csv");
    for (mode, out) in [("exact", &exact), ("quadrature", &quad)] {
        let res = urnchain(&[
            "pmf", "--sizes", "3,4", "--priors", "2:5,1:3", "--mode", mode, "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success());
    }
    let (a, b) = (read_table(&exact), read_table(&quad));
    assert_eq!(a.len(), 20);
    for ((ka, pa), (kb, pb)) in a.iter().zip(&b) {
        assert_eq!(ka, kb);
        assert!((pa - pb).abs() < 1e-7);
    }
}

#[test]
fn cap_violation_exits_with_resource_code() {
    let res = urnchain(&[
        "pmf", "--sizes", "50,50,50", "--priors", "1:1,1:1,1:1", "--cap", "1000",
    ]);
    assert_eq!(res.status.code(), Some(4));
    assert!(String::from_utf8(res.stderr).unwrap().contains("--mode mc"));
}

#[test]
fn monte_carlo_mode_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mc.csv");
    let res = urnchain(&[
        "pmf", "--sizes", "2", "--priors", "2:3", "--mode", "mc", "--replicates", "20000",
        "--seed", "9", "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let report = fs::read_to_string(dir.path().join("mc.csv.report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next().unwrap(), "f_1,estimate,standard_error,replicates,seed");
    assert_eq!(lines.count(), 3);
}

#[test]
fn sample_command_writes_chain_draws() {
    let res = urnchain(&["sample", "--priors", "2:3,4:5", "--draws", "5", "--seed", "1"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "draw,d_1,d_2,total_1,total_2,inc_1,inc_2");
    for line in lines {
        let v: Vec<f64> = line.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert!(v[2] <= v[3]);
        assert!((v[4] + v[5] - v[3]).abs() < 1e-15);
    }
}
