use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wehnet::NetworkConfig;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wehnet"));
    cmd.env("RUST_LOG", "error");
    cmd
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn config_file(dir: &Path, cfg: &NetworkConfig) -> PathBuf {
    write_json(dir, "config.json", cfg)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv_text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    reader
        .records()
        .map(|r| header.iter().cloned().zip(r.unwrap().iter().map(String::from)).collect())
        .collect()
}

fn column(rows: &[std::collections::HashMap<String, String>], name: &str) -> Vec<f64> {
    rows.iter().map(|r| r[name].parse().unwrap()).collect()
}

#[test]
fn analytic_report_for_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin().arg("analytic").arg("--config").arg(config_file(dir.path(), &NetworkConfig::default())));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let p_dc = report["p_dc"].as_f64().unwrap();
    let p_cc = report["p_cc"].as_f64().unwrap();
    assert!(0.0 < p_dc && p_dc < 1.0 && 0.0 < p_cc && p_cc < 1.0);
    assert!(p_cc >= p_dc);
    assert!(report.get("pdps_cR").is_some() && report.get("lambda_opt").is_some());
}

#[test]
fn bad_exponent_exits_two_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = NetworkConfig { alpha: 2.0, ..NetworkConfig::default() };
    let out = run(bin().arg("analytic").arg("--config").arg(config_file(dir.path(), &cfg)));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn zero_source_intensity_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = NetworkConfig { lambda1: 0.0, ..NetworkConfig::default() };
    let out = run(bin().arg("analytic").arg("--config").arg(config_file(dir.path(), &cfg)));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"lambda1": 0.1}"#).unwrap();
    let out = run(bin().arg("analytic").arg("--config").arg(&path));
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    assert_eq!(run(bin().arg("optimal").arg("--config").arg(&missing)).status.code(), Some(2));
}

#[test]
fn validate_rejects_small_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["validate", "--n", "10", "--config"])
        .arg(config_file(dir.path(), &NetworkConfig::default())));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_is_byte_identical_on_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(dir.path(), &NetworkConfig::default());
    let once = |threads: &str| {
        run(bin()
            .args(["--threads", threads, "validate", "--n", "100", "--side", "80", "--probes", "64", "--seed", "11", "--config"])
            .arg(&cfg))
    };
    let a = once("1");
    let b = once("2");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
    let text = stdout(&a);
    assert!(text.starts_with("metric,analytic,mc_mean,mc_std_error,n,z_score\n"));
    assert!(!text.contains('\r'));
    let table = rows(&text);
    let direct = table.iter().find(|r| r["metric"] == "p_dc").unwrap();
    let z: f64 = direct["z_score"].parse().unwrap();
    assert!(z.abs() <= 4.0, "p_dc z = {z}");
}

#[test]
fn optimal_intensity_per_fading_rate() {
    let dir = tempfile::tempdir().unwrap();
    for (mu, expected) in [(0.5, 0.25), (1.0, 0.5)] {
        let cfg = NetworkConfig { mu, ..NetworkConfig::default() };
        let out = run(bin().arg("optimal").arg("--config").arg(config_file(dir.path(), &cfg)));
        assert!(out.status.success());
        let rec: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let numeric = rec["numeric"].as_f64().unwrap();
        assert!((numeric / expected - 1.0).abs() <= 0.2, "mu = {mu}: {numeric}");
        assert!(rec["closed_form"].as_f64().is_some());
        assert!(rec["relative_gap"].as_f64().unwrap() > 0.05);
        assert!(rec["warning"].is_string());
    }
}

#[test]
fn monotone_efficiency_has_no_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = NetworkConfig::default();
    cfg.rectenna.a3 = 0.0;
    cfg.rectenna.a2 = 0.0;
    let out = run(bin().arg("optimal").arg("--config").arg(config_file(dir.path(), &cfg)));
    assert_eq!(out.status.code(), Some(3));
}

fn sweep_file(dir: &Path, variable: &str, grid: &[f64]) -> PathBuf {
    write_json(
        dir,
        "sweep.json",
        &serde_json::json!({ "variable": variable, "grid": grid, "fixed": NetworkConfig::default() }),
    )
}

#[test]
fn split_sweep_trades_little_probability_for_much_energy() {
    let dir = tempfile::tempdir().unwrap();
    let grid: Vec<f64> = (0..=8).map(|k| -20.0 + 2.5 * k as f64).collect();
    let out = run(bin().arg("sweep").arg("--sweep").arg(sweep_file(dir.path(), "psi_db", &grid)));
    assert!(out.status.success());
    let table = rows(&stdout(&out));
    let p_dc = column(&table, "p_dc");
    let near_zero = p_dc[0];
    let at_tenth = p_dc[4];
    assert!(near_zero - at_tenth <= 0.01);
    let limiting: Vec<f64> = column(&table, "peh_d1")
        .iter()
        .zip(column(&table, "peh_d2"))
        .map(|(a, b)| a.min(b))
        .collect();
    let ratio = limiting[4] / limiting[8];
    assert!(ratio > 2.0 && ratio < 3.0, "ratio {ratio}");
}

#[test]
fn threshold_sweep_is_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let grid = [-10.0, -5.0, 0.0, 5.0, 10.0];
    let out = run(bin().arg("sweep").arg("--sweep").arg(sweep_file(dir.path(), "gamma_star_db", &grid)));
    let table = rows(&stdout(&out));
    for name in ["p_dc1", "p_dc", "p_cc"] {
        let p = column(&table, name);
        assert!(p.windows(2).all(|w| w[1] < w[0]), "{name}: {p:?}");
    }
}

#[test]
fn intensity_sweep_has_interior_peak() {
    let dir = tempfile::tempdir().unwrap();
    let mut fixed = NetworkConfig { mu: 0.5, ..NetworkConfig::default() };
    fixed.lambda1 = 0.1;
    let grid: Vec<f64> = (1..=20).map(|k| 0.025 * k as f64).collect();
    let path = write_json(
        dir.path(),
        "sweep.json",
        &serde_json::json!({ "variable": "lambda2", "grid": grid, "fixed": fixed }),
    );
    let out = run(bin().arg("sweep").arg("--sweep").arg(&path));
    let peh = column(&rows(&stdout(&out)), "peh_d1");
    let best = peh.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert!(best > 0 && best < peh.len() - 1, "peak index {best}");
}

#[test]
fn sweep_rejects_unsorted_grid_and_unknown_mode() {
    let dir = tempfile::tempdir().unwrap();
    let unsorted = sweep_file(dir.path(), "mu", &[1.0, 0.5]);
    assert_eq!(run(bin().arg("sweep").arg("--sweep").arg(&unsorted)).status.code(), Some(2));
    let sorted = sweep_file(dir.path(), "mu", &[0.5, 1.0]);
    let out = run(bin().args(["sweep", "--mode", "sideways", "--sweep"]).arg(&sorted));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = sweep_file(dir.path(), "mu", &[0.5, 1.0]);
    let target = dir.path().join("series.csv");
    let out = run(bin().args(["sweep", "--mode", "timeseries", "--points", "5", "--sweep"]).arg(&spec).arg("--out").arg(&target));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("mu,scenario,time_s,cp,cumulative_messages,error\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 5);
}

#[test]
fn simulated_sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = sweep_file(dir.path(), "gamma_star_db", &[0.0, 5.0]);
    let once = || {
        run(bin()
            .args(["sweep", "--mode", "both", "--n", "4", "--side", "60", "--radius", "15", "--probes", "32", "--seed", "3", "--sweep"])
            .arg(&spec))
    };
    let a = once();
    assert!(a.status.success());
    assert_eq!(a.stdout, once().stdout);
    let table = rows(&stdout(&a));
    assert_eq!(table.len(), 2);
    assert!(table[0].contains_key("p_dc") && table[0].contains_key("p_dc_mc_mean"));
}
