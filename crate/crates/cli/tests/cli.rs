//! End-to-end runs of the `dblab` binary.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dblab"))
        .args(args)
        .env_remove("DBLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn phase_of_paley_wiener_has_constant_derivative() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = dblab(&["phase", "--window=-5,5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("phase.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - PI * v[0]).abs() < 1e-12 * (1.0 + v[0].abs()));
        assert!((v[2] - PI).abs() < 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 201);
    let r = read_report(&out);
    assert_eq!(r["command"], "phase");
    assert_eq!(r["artifacts"][0], "phase.csv");
}

#[test]
fn frame_on_integers_is_tight() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "frame.json",
        r#"{"window": [-40, 40],
            "sequence": {"kind": "lattice", "spacing": 1.0},
            "frame": {"alpha": 0.0, "trim": 4, "basis_window": [-20.5, 19.5]}}"#,
    );
    let o = dblab(&["frame", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let a = r["results"]["frame"]["lower"].as_f64().unwrap();
    let b = r["results"]["frame"]["upper"].as_f64().unwrap();
    assert!((a - 1.0).abs() < 1e-6 && (b - 1.0).abs() < 1e-6, "A = {a}, B = {b}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write_config(tmp.path(), "unknown.json", r#"{"spcae": {"kind": "pw", "a": 3.0}}"#);
    let bad_space = write_config(tmp.path(), "space.json", r#"{"space": {"kind": "pw", "a": -1.0}}"#);
    let no_seq = write_config(tmp.path(), "noseq.json", "{}");
    for (cmd, cfg) in [("phase", &unknown), ("phase", &bad_space), ("riesz", &no_seq)] {
        let o = dblab(&[cmd, "--config", cfg]);
        assert_eq!(o.status.code(), Some(2), "{cmd} {cfg}");
        let r: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(r["error"]["kind"], "config");
    }
    assert_eq!(dblab(&["phase", "--config", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(dblab(&["phase", "--window", "1"]).status.code(), Some(2));
    assert_eq!(dblab(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    // Two nearly coincident nodes make the Gram matrix singular.
    let cfg = write_config(
        tmp.path(),
        "close.json",
        r#"{"sequence": {"kind": "points", "points": [0.0, 1e-9, 2.0]},
            "interpolate": {"method": "min_norm", "values": [1.0, 2.0, 3.0]}}"#,
    );
    let o = dblab(&["interpolate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["error"]["kind"], "numeric");
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "interp.json",
        r#"{"window": [-30, 30], "seed": 7,
            "sequence": {"kind": "lattice", "spacing": 1.2},
            "interpolate": {"method": "min_norm", "probe_points": 101}}"#,
    );
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let o = dblab(&["interpolate", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        let mut r = read_report(&out);
        r.as_object_mut().unwrap().remove("timing");
        reports.push((serde_json::to_string(&r).unwrap(), std::fs::read(out.join("interpolant.csv")).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
    // A different seed draws different data.
    let out = tmp.path().join("c");
    dblab(&["interpolate", "--config", &cfg, "--seed", "8", "--out", out.to_str().unwrap()]);
    assert_ne!(std::fs::read(out.join("data.csv")).unwrap(), reports[0].1);
}

#[test]
fn config_echo_reparses_to_the_same_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "dens.json",
        r#"{"space": {"kind": "zeros", "zeros": [[0.0, -1.0], [2.0, -0.5]]},
            "window": [-20, 20],
            "sequence": {"kind": "phase_step", "step": 2.5, "alpha": 0.1},
            "density": {"r": [3.0, 6.0]}}"#,
    );
    let o = dblab(&["density", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let echo = serde_json::from_slice::<Value>(&o.stdout).unwrap()["config"].clone();
    let again = write_config(tmp.path(), "echo.json", &serde_json::to_string(&echo).unwrap());
    let o2 = dblab(&["density", "--config", &again]);
    assert!(o2.status.success());
    let r2: Value = serde_json::from_slice(&o2.stdout).unwrap();
    assert_eq!(r2["config"], echo);
    assert_eq!(
        r2["results"],
        serde_json::from_slice::<Value>(&o.stdout).unwrap()["results"]
    );
}

#[test]
fn suite_subset_passes_and_thread_cap_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_dblab"))
        .args(["suite", "--only", "1,6"])
        .env("DBLAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["passed"], true);
    assert_eq!(r["results"]["criteria"].as_array().unwrap().len(), 2);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("criterion  1 [PASS]"));
    let bad = Command::new(env!("CARGO_BIN_EXE_dblab"))
        .args(["phase"])
        .env("DBLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(dblab(&["suite", "--only", "99"]).status.code(), Some(2));
}

#[test]
fn every_command_runs_on_a_full_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "full.json",
        r#"{"space": {"kind": "pw", "a": 3.141592653589793},
            "window": [-100, 100],
            "sequence": {"kind": "phase_step", "step": 3.7699111843077517},
            "density": {"r": [12.566370614359172, 25.132741228718345]},
            "frame": {"alpha": 1.5707963267948966, "trim": 4, "basis_window": [-20, 20]},
            "multiplier": {"epsilon": 0.1},
            "interpolate": {"method": "plan"}}"#,
    );
    for cmd in ["phase", "doubling", "density", "frame", "riesz", "interpolate", "multiplier", "peak"] {
        let out = tmp.path().join(cmd);
        let o = dblab(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let r = read_report(&out);
        assert_eq!(r["command"], cmd);
        for a in r["artifacts"].as_array().unwrap() {
            let path = out.join(a.as_str().unwrap());
            let text = std::fs::read_to_string(&path).unwrap();
            assert!(text.lines().count() >= 2, "{} is empty", path.display());
        }
    }
}
