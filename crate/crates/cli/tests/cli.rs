use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sphereflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphereflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const QUICK: [&str; 8] = [
    "--N",
    "48",
    "--t-max",
    "0.1",
    "--shape",
    "perturbed:0.8,0.05,2",
    "--seed",
    "7",
];

fn quick_run(command: &str, out: &Path) -> Output {
    let mut args = vec![command, "--out", out.to_str().unwrap()];
    args.extend(QUICK);
    sphereflow(&args)
}

#[test]
fn run_writes_trace_checkpoint_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = quick_run("run", dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next().unwrap(), "# sphereflow run seed=7 n=2 k=1 N=48");
    assert!(lines.next().unwrap().starts_with("t,A_-1,A_0,A_1,A_2,minU"));
    assert_eq!(lines.count(), 11);
    let cp = json(&dir.path().join("final.json"));
    assert_eq!(cp["seed"], 7);
    assert_eq!(cp["k"], 1);
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["termination"], "timeLimit");
    assert_eq!(summary["config"]["N"], 48);
}

#[test]
fn outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for command in ["run", "dual-run"] {
        assert!(quick_run(command, a.path()).status.success());
        assert!(quick_run(command, b.path()).status.success());
        for file in ["trace.csv", "final.json", "summary.json"] {
            let x = std::fs::read(a.path().join(file)).unwrap();
            let y = std::fs::read(b.path().join(file)).unwrap();
            assert_eq!(x, y, "{command} {file}");
        }
    }
}

#[test]
fn dual_run_adds_eigenvalue_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = quick_run("dual-run", dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let header = trace.lines().nth(1).unwrap();
    assert!(header.ends_with("minEigW,maxEigW,breakdownTime"));
    let support = json(&dir.path().join("final_support.json"));
    assert_eq!(support["u"].as_array().unwrap().len(), 48);
}

#[test]
fn audit_reads_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    assert!(quick_run("run", dir.path()).status.success());
    let cp = dir.path().join("final.json");
    let report = dir.path().join("audit.json");
    let out = sphereflow(&[
        "audit",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--k",
        "1",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&report);
    assert_eq!(v["k"], 1);
    let entries = v["audit"]["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e["violated"] == false));

    let stdout = sphereflow(&["audit", "--checkpoint", cp.to_str().unwrap()]);
    assert!(stdout.status.success());
    let printed: Value = serde_json::from_slice(&stdout.stdout).unwrap();
    assert_eq!(printed["audit"], v["audit"]);
}

#[test]
fn identity_suite_passes_and_records_seed() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("suite.json");
    let out = sphereflow(&[
        "identity-suite",
        "--n-max",
        "4",
        "--samples",
        "200",
        "--seed",
        "7",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&report);
    assert_eq!(v["seed"], 7);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failures"] == 0));
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "--bogus"],
        vec!["frobnicate"],
        vec!["run", "--k", "2", "--out", out_dir],
        vec!["run", "--shape", "perturbed:1.2,0.2,2", "--out", out_dir],
        vec!["run", "--config", "/nonexistent/config.json", "--out", out_dir],
        vec!["audit", "--checkpoint", "/nonexistent/final.json"],
        vec!["identity-suite", "--n-max", "1"],
    ] {
        let out = sphereflow(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(sphereflow(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"n": 3, "k": 2, "N": 40, "tMax": 5.0, "convergenceTol": 1e-6,
            "initialShape": {"geodesicSphere": {"r": 0.6}}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = sphereflow(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--t-max",
        "0.05",
        "--shape",
        "perturbed:0.7,0.03,2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out_dir.join("summary.json"));
    assert_eq!(summary["config"]["n"], 3);
    assert_eq!(summary["config"]["N"], 40);
    assert_eq!(summary["config"]["tMax"], 0.05);
    assert_eq!(summary["config"]["initialShape"]["perturbed"]["r0"], 0.7);
}

#[test]
fn sweep_runs_into_subdirectories() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.json");
    std::fs::write(
        &sweep,
        r#"[{"n": 2, "k": 0, "N": 32, "tMax": 0.05, "convergenceTol": 1e-6,
             "initialShape": {"perturbed": {"r0": 0.8, "eps": 0.05, "mode": 2}}},
            {"n": 3, "k": 1, "N": 32, "tMax": 0.05, "convergenceTol": 1e-6,
             "initialShape": {"perturbed": {"r0": 0.8, "eps": 0.05, "mode": 2}}}]"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = sphereflow(&[
        "run",
        "--sweep",
        sweep.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for (i, n) in [(0, 2), (1, 3)] {
        let s = json(&out_dir.join(format!("run-{i:03}")).join("summary.json"));
        assert_eq!(s["config"]["n"], n);
    }
}

#[test]
fn custom_shape_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    assert!(quick_run("run", dir.path()).status.success());
    let shape = format!("custom:{}", dir.path().join("final.json").display());
    let next = dir.path().join("next");
    let out = sphereflow(&[
        "run",
        "--N",
        "48",
        "--t-max",
        "0.02",
        "--shape",
        &shape,
        "--out",
        next.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mismatched = sphereflow(&["run", "--N", "64", "--shape", &shape, "--out", next.to_str().unwrap()]);
    assert_eq!(mismatched.status.code(), Some(1));
}

#[test]
fn checkpoints_are_written_on_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "run",
        "--out",
        dir.path().to_str().unwrap(),
        "--checkpoint-every",
        "0.05",
    ];
    args.extend(QUICK);
    assert!(sphereflow(&args).status.success());
    let cps = dir.path().join("checkpoints");
    assert!(cps.join("cp-0001.json").exists() && cps.join("cp-0002.json").exists());
    assert_eq!(json(&cps.join("cp-0002.json"))["seed"], 7);
}

#[test]
fn convergence_study_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = sphereflow(&[
        "convergence-study",
        "--levels",
        "33,65,129",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("convergence.json"));
    for o in v["orders"].as_array().unwrap() {
        assert!(o["residualU"].as_f64().unwrap() > 1.8);
        assert!(o["residualF"].as_f64().unwrap() > 1.8);
    }
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert!(csv.starts_with("# sphereflow convergence-study seed=0"));
    assert_eq!(csv.lines().count(), 5);
}
