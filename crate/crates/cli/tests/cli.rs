use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use coalesce_cli::commands::{read_fit_csv, SimulationSummary};

fn coalesce(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coalesce"))
        .args(args)
        .env("COALESCE_OUTPUT", root)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(dir: &Path) -> SimulationSummary {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

const CONSTANT: &str = r#"
name = "flat"

[flux]
kind = "quadratic"

[grid]
x_min = -5.0
x_max = 5.0
h = 0.05

[time]
t_end = 0.1
tau = 0.001

[initial]
kind = "constant"
value = 0.5
"#;

#[test]
fn shock_a1_track_terminates_near_coalescence_and_refits_identically() {
    let root = tempfile::tempdir().unwrap();
    let o = coalesce(root.path(), &["simulate", "shock-a1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dir = root.path().join("shock-a1");
    for f in ["track.csv", "summary.json", "fit.csv", "residual.csv", "zero_count.csv", "snapshots/trajectory.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let s = summary(&dir);
    let t = s.coalescence_time.unwrap();
    assert!((t - 0.254).abs() < 0.002, "{t}");
    assert_eq!(s.final_zero_count, 0);

    let refit_dir = root.path().join("refit");
    let o = coalesce(
        root.path(),
        &["fit", dir.join("track.csv").to_str().unwrap(), "--out", refit_dir.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let refit = read_fit_csv(&refit_dir.join("fit.csv")).unwrap();
    assert_eq!(refit, s.fit.unwrap());
    assert_eq!(refit, read_fit_csv(&dir.join("fit.csv")).unwrap());
    assert_eq!(
        fs::read(refit_dir.join("residual.csv")).unwrap(),
        fs::read(dir.join("residual.csv")).unwrap()
    );
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for root in [&a, &b] {
        assert_eq!(code(&coalesce(root.path(), &["simulate", "anti-a1"])), 0);
    }
    for f in ["track.csv", "summary.json", "fit.csv", "snapshots/snap_000100.csv"] {
        assert_eq!(
            fs::read(a.path().join("anti-a1").join(f)).unwrap(),
            fs::read(b.path().join("anti-a1").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn constant_data_has_no_interfaces() {
    let root = tempfile::tempdir().unwrap();
    let manifest = root.path().join("flat.toml");
    fs::write(&manifest, CONSTANT).unwrap();
    let o = coalesce(root.path(), &["simulate", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dir = root.path().join("flat");
    assert_eq!(fs::read_to_string(dir.join("track.csv")).unwrap(), "t,branch_id,xi\n");
    let s = summary(&dir);
    assert_eq!((s.initial_zero_count, s.final_zero_count), (0, 0));
    assert!(s.branches.is_empty());
}

#[test]
fn coarse_step_oscillation_exits_3() {
    let root = tempfile::tempdir().unwrap();
    let manifest = root.path().join("coarse.toml");
    let text = coalesce(root.path(), &["preset", "shock-a4"]);
    let coarse = stdout(&text).replace("tau = 0.0005", "tau = 0.1");
    assert!(coarse.contains("tau = 0.1"));
    fs::write(&manifest, coarse).unwrap();
    let o = coalesce(root.path(), &["simulate", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("oscillation"), "{}", stderr(&o));
}

#[test]
fn bad_input_exits_2() {
    let root = tempfile::tempdir().unwrap();
    assert_eq!(code(&coalesce(root.path(), &["simulate", "no-such-preset"])), 2);

    let empty = root.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&coalesce(root.path(), &["fit", empty.to_str().unwrap()])), 2);

    let header_only = root.path().join("header.csv");
    fs::write(&header_only, "t,branch_id,xi\n").unwrap();
    assert_eq!(code(&coalesce(root.path(), &["fit", header_only.to_str().unwrap()])), 2);

    let few = root.path().join("few.csv");
    fs::write(&few, "t,branch_id,xi\n0.1,0,0.5\n0.2,0,0.4\n0.3,0,0.3\n").unwrap();
    assert_eq!(code(&coalesce(root.path(), &["fit", few.to_str().unwrap()])), 2);

    let o = coalesce(root.path(), &["oracle", "green", "--param", "phi_star=-1"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&coalesce(root.path(), &["oracle", "heat"])), 2);
    assert_eq!(code(&coalesce(root.path(), &["bounds", "anti-a1"])), 2);
}

#[test]
fn fit_recovers_synthetic_square_root_law() {
    let root = tempfile::tempdir().unwrap();
    let track = root.path().join("track.csv");
    let mut text = String::from("t,branch_id,xi\n");
    for k in 0..400 {
        let t = k as f64 * 0.001;
        text.push_str(&format!("{t:.16e},0,{:.16e}\n", (6.0 * (0.4 - t)).sqrt()));
    }
    fs::write(&track, text).unwrap();
    let o = coalesce(root.path(), &["fit", track.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let fit = read_fit_csv(&root.path().join("fit.csv")).unwrap();
    assert!((fit.c1 - 0.5).abs() <= 0.01, "{}", fit.c1);
    assert!((fit.c2.exp() / 6f64.sqrt() - 1.0).abs() <= 0.02, "{}", fit.c2.exp());
    assert!((fit.t0 - 0.4).abs() < 1e-3, "{}", fit.t0);
}

fn read_csv(path: &Path) -> Vec<(f64, f64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,u"));
    lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn oracle_outputs() {
    let root = tempfile::tempdir().unwrap();
    let o = coalesce(root.path(), &["oracle", "cole-hopf"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dir = root.path().join("oracle-cole-hopf");
    for t in ["0", "0.1", "0.205", "0.5"] {
        assert!(dir.join(format!("cole-hopf_t{t}.csv")).exists(), "{t}");
    }
    let t0: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("t0 = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((t0 - 0.205).abs() < 0.002);

    let o = coalesce(root.path(), &["oracle", "green", "--t", "0", "-p", "phi_star=1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for (x, u) in read_csv(&root.path().join("oracle-green/green_t0.csv")) {
        let expected = x.signum() * (-x.abs()).exp_m1();
        assert!((u - expected).abs() < 1e-15, "{x}");
    }

    let o = coalesce(root.path(), &["oracle", "profile", "--x-min", "-4", "--x-max", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_csv(&root.path().join("oracle-profile/profile_t0.csv"));
    assert_eq!(rows.len(), 801);
    for (x, u) in rows {
        let expected = x.signum() * (1.0 - (-x.abs()).exp());
        assert!((u - expected).abs() < 1e-15, "{x}");
    }
}

#[test]
fn bounds_for_shock_preset() {
    let root = tempfile::tempdir().unwrap();
    let o = coalesce(root.path(), &["bounds", "shock-a1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("T = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(t > 0.254 && t.is_finite(), "{t}");
    assert!(root.path().join("shock-a1/bounds.json").exists());
}

#[test]
fn verify_bounds_suite_passes() {
    let root = tempfile::tempdir().unwrap();
    let o = coalesce(root.path(), &["verify", "bounds"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("[PASS] 10"));
    assert!(out.contains("[PASS] 12"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.path().join("verify/report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert_eq!(report["results"].as_array().unwrap().len(), 2);
}
