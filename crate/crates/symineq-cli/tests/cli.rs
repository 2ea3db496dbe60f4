//! End-to-end checks of the `symineq` binary: exit codes and output files.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symineq"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symineq-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn geom_reports_preset_geometry() {
    let out = bin()
        .args(["geom", "l-shape", "--grid", "32", "--frostman", "2.0"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("perimeter: 4"));
    assert!(text.contains("frostman constant"));
}

#[test]
fn run_executes_a_config_and_writes_reports() {
    let dir = scratch("run");
    let out_dir = dir.join("out");
    let config = serde_json::json!({
        "domain": { "preset": "square" },
        "grid_n": 20,
        "n_theta": 64,
        "boundary_spacing": 0.05,
        "trials": [
            { "kind": "rigid", "b": [1.0, 0.0], "omega": 0.0 },
            { "kind": "radial", "center": [0.43, 0.57],
              "profile": { "kind": "power", "gamma": 1.0 } }
        ],
        "inequalities": [ { "id": "subcritical", "p": 1.5 } ],
        "potential_method": "direct",
        "out_dir": out_dir,
        "seed": 3
    });
    let cfg_path = dir.join("config.json");
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let out = bin().args(["run"]).arg(&cfg_path).output().unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("manifest.json").exists());
    let csv = std::fs::read_to_string(out_dir.join("reports/sobolev.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3, "header plus one row per trial");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn self_intersecting_ring_exits_with_one() {
    let dir = scratch("bad-ring");
    let config = serde_json::json!({
        "domain": { "rings": [[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]] },
        "out_dir": dir.join("out")
    });
    let cfg_path = dir.join("config.json");
    std::fs::write(&cfg_path, serde_json::to_string(&config).unwrap()).unwrap();
    let out = bin().args(["run"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("intersects"), "diagnostic missing: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn hardy_preset_writes_sweep_csv() {
    let dir = scratch("hardy");
    let out = bin()
        .args(["hardy", "subcritical", "--members", "6"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("reports/hardy.csv")).unwrap();
    assert!(csv.starts_with("kernel,alpha,n,member,source_norm,target_norm,ratio"));
    assert_eq!(csv.lines().count(), 7);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_subcommand_runs_an_inequality() {
    let dir = scratch("verify");
    let out = bin()
        .args([
            "verify",
            "subcritical",
            "--p",
            "1.5",
            "--domain",
            "l-shape",
            "--grid",
            "32",
            "--ntheta",
            "64",
            "--potential-method",
            "direct",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("reports/sobolev.csv").exists());
    assert!(dir.join("reports/pointwise.csv").exists());
    assert!(dir.join("reports/rearrangement.csv").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_inequality_is_a_usage_error() {
    let out = bin().args(["verify", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
