//! End-to-end runs of the command-line tool.

use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poisson-deconv"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn rates_prints_the_functionals() {
    let out = cli(&["rates", "--gamma", "pol", "--alpha", "pol", "--p", "1", "--a", "1", "--n", "1000", "--m", "1000"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["phi"].as_f64().unwrap() - 1e-3).abs() < 1e-15);
    assert!(v["k_star"].as_u64().unwrap() >= 1);
    let order = v["psi_order"].as_f64().unwrap();
    assert!((order - 1000f64.powf(-0.4)).abs() < 1e-12);
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let est = dir.path().join("est.csv");
    let out = cli(&[
        "simulate",
        "--intensity",
        r#"{"family":"cosine","tau":50,"beta":0.5}"#,
        "--error",
        r#"{"family":"poisson_kernel","rate":0.7}"#,
        "--n",
        "20",
        "--m",
        "500",
        "--seed",
        "3",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&data).unwrap();
    assert!(text.starts_with("kind,index,value\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("error,")).count(), 500);

    let out = cli(&["estimate", "--data", data.to_str().unwrap(), "--k", "2", "--out", est.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let coeffs = std::fs::read_to_string(&est).unwrap();
    assert_eq!(coeffs.lines().count(), 1 + 5);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("est.json")).unwrap()).unwrap();
    assert_eq!(sidecar["n"], 20);
    assert_eq!(sidecar["m"], 500);
    assert_eq!(sidecar["k"], 2);
    assert_eq!(sidecar["flags"].as_array().unwrap().len(), 3);

    let out = cli(&["estimate", "--data", data.to_str().unwrap(), "--out", est.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("selected k ="));
}

#[test]
fn bench_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"intensity":{"family":"uniform","tau":5},"error":{"family":"poisson_kernel","rate":0.7},
            "gamma":{"kind":"pol","power":2},"r":100,"alpha":{"kind":"exp","rate":-1.4},"d":1,
            "n_grid":[10],"m_grid":[50],"reps":4,"seed":1,"estimators":["full",{"fixed":1}]}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let gp = dir.path().join("out.gp");
    let out = cli(&[
        "bench",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
        "--emit-gnuplot",
        gp.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
    assert!(gp.exists());
}

#[test]
fn bad_input_fails_cleanly() {
    let out = cli(&["simulate", "--intensity", r#"{"family":"cosine","beta":1.5}"#, "--error", r#"{"family":"uniform"}"#,
        "--n", "1", "--m", "1", "--out", "/dev/null"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
