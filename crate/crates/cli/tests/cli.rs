use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(config: &str, dir: &Path, extra: &[&str]) -> (i32, Value, String) {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_wlsi"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    let report: Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    (o.status.code().unwrap(), report, String::from_utf8_lossy(&o.stderr).into_owned())
}

const GAUSS_WLSI: &str = r#"{
  "measure": {"kind": "one_dim", "potential": "-r^2/2"},
  "checks": [{"id": "wlsi_tilts", "type": "wlsi", "weight": {"source": "constant", "c": 1},
              "families": [{"tag": "exp_tilts"}]}]
}"#;

#[test]
fn gaussian_wlsi_passes_with_constant_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rep, _) = run(GAUSS_WLSI, dir.path(), &[]);
    assert_eq!(code, 0);
    let c = &rep["checks"][0];
    assert_eq!(c["status"], "pass");
    assert_eq!(c["type"], "wlsi");
    assert!((c["C_est"].as_f64().unwrap() - 2.0).abs() < 1e-6, "{c}");
    assert_eq!(c["n_members"], 41);
    let csv = fs::read_to_string(dir.path().join("out/wlsi_tilts.csv")).unwrap();
    assert!(csv.starts_with("member_id,param,lhs,rhs,ratio,margin\n"));
    assert_eq!(csv.lines().count(), 42);
    assert_eq!(rep["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(rep["seed"], 42);
}

#[test]
fn missed_target_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GAUSS_WLSI.replace(r#""families""#, r#""c_target": 1.5, "families""#);
    let (code, rep, _) = run(&cfg, dir.path(), &[]);
    assert_eq!(code, 2);
    assert_eq!(rep["checks"][0]["status"], "violation");
    assert!(rep["checks"][0]["n_violations"].as_u64().unwrap() > 0);
}

#[test]
fn unbounded_eta_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
      "measure": {"kind": "one_dim", "potential": "-r^2/2"},
      "checks": [
        {"id": "tail", "type": "wlsi",
         "weight": {"source": "thm11", "beta": {"form": "exp_power", "c": 1.0, "delta": 0.5}},
         "families": [{"tag": "exp_tilts"}]},
        {"id": "ok", "type": "wlsi", "weight": {"source": "constant", "c": 1}, "families": [{"tag": "exp_tilts"}]}
      ]
    }"#;
    let (code, rep, stderr) = run(cfg, dir.path(), &[]);
    assert_eq!(code, 1);
    let c = &rep["checks"][0];
    assert_eq!(c["status"], "error");
    let msg = c["error"].as_str().unwrap();
    assert!(msg.contains("tail") && msg.contains("eta is unbounded"), "{msg}");
    assert!(stderr.contains("eta is unbounded"));
    // the other check still ran
    assert_eq!(rep["checks"][1]["status"], "pass");
}

#[test]
fn malformed_potential_reports_field_and_offset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GAUSS_WLSI.replace("-r^2/2", "-r^");
    let (code, rep, stderr) = run(&cfg, dir.path(), &[]);
    assert_eq!(code, 1);
    assert_eq!(rep["error"]["path"], "measure.potential");
    assert_eq!(rep["error"]["offset"], 3);
    assert_eq!(rep["checks"][0]["status"], "error");
    assert!(stderr.contains("measure.potential"));
}

#[test]
fn schema_errors_carry_paths() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GAUSS_WLSI.replace(r#""c": 1"#, r#""c": 1, "colour": 2"#);
    let (code, rep, _) = run(&cfg, dir.path(), &[]);
    assert_eq!(code, 1);
    assert_eq!(rep["error"]["path"], "checks[0]");
    assert!(rep["error"]["message"].as_str().unwrap().contains("colour"));
    assert!(rep["checks"].as_array().unwrap().is_empty());

    let cfg = GAUSS_WLSI.replace(r#""source": "constant", "c": 1"#, r#""source": "thm412""#);
    let (code, rep, _) = run(&cfg, dir.path(), &[]);
    assert_eq!(code, 1);
    assert_eq!(rep["error"]["path"], "checks[0].weight");
}

#[test]
fn strict_counts_skipped_members() {
    let dir = tempfile::tempdir().unwrap();
    // the lambda = 0 tilt is degenerate
    let (code, rep, _) = run(GAUSS_WLSI, dir.path(), &["--strict"]);
    assert_eq!(rep["checks"][0]["n_skipped"], 1);
    assert_eq!(code, 2);
}

const MIXED: &str = r#"{
  "measure": {"kind": "one_dim", "potential": {"a": 0.5, "theta": 2}},
  "grid": {"n": 48, "r_max": 4},
  "checks": [
    {"id": "est", "type": "beta_estimate", "r_grid": {"min": 0.05, "max": 5, "points": 6, "log": true},
     "families": [{"tag": "exp_tilts", "lambda": {"min": -1, "max": 1, "step": 0.5}}]},
    {"id": "est2", "type": "beta_estimate", "scheme": "equal_mass", "r_grid": [0.1, 1.0],
     "families": [{"tag": "lipschitz_bumps", "centers": {"min": -1, "max": 1, "step": 1}}]},
    {"id": "dev", "type": "deviation", "rate": {"c": 2}, "event": {"below": 0}, "radii": {"min": 1.2, "max": 5, "points": 5}},
    {"id": "tal", "type": "talagrand", "cost": {"kind": "power", "p": 2},
     "families": [{"tag": "translates", "shift": {"min": -1, "max": 1, "step": 0.5}}]}
  ],
  "output": {"tables": [{"table": "weight", "file": "alpha.csv", "weight": {"source": "line_transport"}},
                        {"table": "map", "file": "map.csv"}, {"table": "grid", "file": "grid.csv"}]}
}"#;

fn strip_volatile(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("wallclock_ms");
    }
    v
}

#[test]
fn deterministic_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ca, ra, _) = run(MIXED, a.path(), &["--jobs", "1"]);
    let (cb, rb, _) = run(MIXED, b.path(), &["--jobs", "4"]);
    assert_eq!(ca, 0, "{ra}");
    assert_eq!(cb, 0);
    assert_eq!(strip_volatile(ra.clone()), strip_volatile(rb));
    for f in ["est.csv", "est2.csv", "dev.csv", "tal.csv", "alpha.csv", "map.csv", "grid.csv"] {
        let x = fs::read(a.path().join("out").join(f)).unwrap();
        let y = fs::read(b.path().join("out").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    assert_eq!(ra["tables"].as_array().unwrap().len(), 3);
    assert!(ra["checks"][0]["details"]["estimate"]["log_beta"].is_array());
}

#[test]
fn seed_changes_only_estimates() {
    let a = tempfile::tempdir().unwrap();
    let (_, ra, _) = run(MIXED, a.path(), &["--seed", "7"]);
    assert_eq!(ra["seed"], 7);
    assert_eq!(ra["checks"][2]["status"], "pass");
}
