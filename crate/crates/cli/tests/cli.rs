use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const FIG2A: &str = r#"
[scenario]
n_nodes = 2
rate_units = "cyclic"
delta_over_2pi_mhz = -10.0
omega_b_over_2pi_mhz = 10.0
g_over_2pi_mhz = [2.0, 0.0]
kappa_over_2pi_mhz = 3.0
gamma_over_2pi_mhz = 1.0
kappa_b_hz = 100.0
phi_adjacent_rad = "pi"
temperature_mk = 10.0
"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magnomech"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .unwrap();
    reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_plateaus() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "fig2a.toml", FIG2A);
    let out = dir.path().join("out");
    let o = run(&[
        "simulate",
        "--config",
        &cfg,
        "--t-max",
        "4",
        "--partition",
        "m2|b1",
        "--sample-every",
        "10000",
        "--out",
        out.to_str().unwrap(),
        "--trajectory",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("simulate.csv"));
    assert_eq!(rows[0], ["t", "m2|b1"]);
    let e: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(e.len(), 5);
    assert_eq!(e[0], 0.0);
    assert!(e[1] > 0.0);
    assert!((e[4] - e[3]).abs() < 0.01 * e[3]);
    assert!((e[4] - 0.2289).abs() < 1e-3, "{}", e[4]);
    assert!(out.join("trajectory.json").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn simulate_at_time_zero_is_separable() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "fig2a.toml", FIG2A);
    let out = dir.path().join("out");
    let o = run(&[
        "simulate",
        "--config",
        &cfg,
        "--t-max",
        "0",
        "--partition",
        "m2|b1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("simulate.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn bad_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "fig2a.toml", FIG2A);
    let out = dir.path().join("out");
    let o = run(&[
        "simulate",
        "--config",
        &cfg,
        "--t-max",
        "1",
        "--partition",
        "x3|b1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("x3"));
    assert!(!out.join("simulate.csv").exists());

    let o = run(&[
        "simulate",
        "--config",
        "/nonexistent.toml",
        "--t-max",
        "1",
        "--partition",
        "m2|b1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let broken = write_config(
        dir.path(),
        "broken.toml",
        "[scenario]\nn_nodes = 2\ncolour = 3\n",
    );
    assert_eq!(
        run(&["validate", "--config", &broken]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["simulate", "--t-max", "1"]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--preset", "fig9z"]).status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    let dir = TempDir::new().unwrap();
    let text = FIG2A
        .replace("rate_units = \"cyclic\"\n", "")
        .replace("[2.0, 0.0]", "[200.0, 0.0]");
    let cfg = write_config(dir.path(), "runaway.toml", &text);
    let o = run(&[
        "simulate",
        "--config",
        &cfg,
        "--t-max",
        "5",
        "--partition",
        "m2|b1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("non-finite"));
}

#[test]
fn steady_state_commands() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "g0.toml", &FIG2A.replace("[2.0, 0.0]", "0.0"));
    let out = dir.path().join("steady");
    let o = run(&[
        "steady",
        "--config",
        &cfg,
        "--partition",
        "m2|b1",
        "--partition",
        "m1,b1|m2,b2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("steady.csv"));
    assert_eq!(rows[0], ["partition", "ln"]);
    assert_eq!(rows[2][0], "m1,b1|m2,b2");
    assert!(rows[1..]
        .iter()
        .all(|r| r[1].parse::<f64>().unwrap() == 0.0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("stability.json")).unwrap()).unwrap();
    assert_eq!(report["stable"], true);
    assert!(report["steady_residual"].as_f64().unwrap() < 1e-8);

    let cm = out.join("steady_cm.json");
    let o = run(&["ln", "--cm", cm.to_str().unwrap(), "--partition", "m2|b1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "partition,ln\r\nm2|b1,0.0000000000000000e0\r\n"
    );
}

#[test]
fn unstable_steady_exits_three_with_report() {
    let dir = TempDir::new().unwrap();
    let lossless = FIG2A
        .replace("kappa_over_2pi_mhz = 3.0", "kappa_over_2pi_mhz = 0.0")
        .replace("gamma_over_2pi_mhz = 1.0", "gamma_over_2pi_mhz = 0.0")
        .replace("kappa_b_hz = 100.0", "kappa_b_hz = 0.0")
        .replace("[2.0, 0.0]", "0.0");
    let cfg = write_config(dir.path(), "lossless.toml", &lossless);
    let out = dir.path().join("steady");
    let o = run(&[
        "steady",
        "--config",
        &cfg,
        "--partition",
        "m2|b1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("unstable"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("stability.json")).unwrap()).unwrap();
    assert_eq!(report["stable"], false);
    assert!(out.join("manifest.json").exists());
    assert!(!out.join("steady.csv").exists());
}

#[test]
fn presets_list_and_validate() {
    let o = run(&["presets", "list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 19);
    assert!(text.lines().any(|l| l.starts_with("fig6c")));

    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "fig2a.toml", FIG2A);
    let o = run(&["validate", "--config", &cfg]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("cyclic"));
    assert!(text.contains("UNSTABLE"));
}

const GRID: &str = r#"
name = "small"
layout = "two_node"
partitions = ["m2|b1", "m1|b1"]

[evaluation]
tau = 0.5

[[axes]]
path = "g"
from = 0.5
to = 3.0
count = 6

[[axes]]
path = "phi"
values = ["pi/2", "pi"]
"#;

#[test]
fn sweeps_are_identical_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let grid = write_config(dir.path(), "grid.toml", GRID);
    let mut csvs = Vec::new();
    for workers in ["1", "8"] {
        let out = dir.path().join(format!("w{workers}"));
        let o = run(&[
            "sweep",
            "--grid",
            &grid,
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        csvs.push(fs::read(out.join("small.csv")).unwrap());
        assert!(out.join("small.json").exists());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    assert!(text.starts_with("g,phi,t,partition,ln,stable,physical,error\r\n"));
    assert_eq!(text.lines().count(), 1 + 6 * 2 * 2);
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn fig2c_phase_ordering() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig2c");
    let o = run(&["sweep", "--preset", "fig2c", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("fig2c.csv"));
    let ln = column(&rows[0], "ln");
    // rows are temperature-major, three phases each in increasing order
    for chunk in rows[1..].chunks(3) {
        let e: Vec<f64> = chunk.iter().map(|r| r[ln].parse().unwrap()).collect();
        assert!(e[2] >= e[1] && e[1] >= e[0], "{chunk:?}");
    }
}

#[test]
fn fig5c_sum_rule() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig5c");
    let o = run(&["sweep", "--preset", "fig5c", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("fig5c.csv"));
    let (n, ln) = (column(&rows[0], "n_nodes"), column(&rows[0], "ln"));
    for pair in rows[1..].chunks(2) {
        assert_eq!(pair[0][column(&rows[0], "partition")], "b1|m2..");
        let nodes: f64 = pair[0][n].parse().unwrap();
        let whole: f64 = pair[0][ln].parse().unwrap();
        let single: f64 = pair[1][ln].parse().unwrap();
        // the sum rule holds to a fraction of a percent at tau = 4
        assert!(
            (whole - (nodes - 1.0) * single).abs() < 1e-2 * whole,
            "N={nodes}: {whole} vs {single}"
        );
    }
}
