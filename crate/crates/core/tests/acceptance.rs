//! Acceptance suite: one line per criterion on stdout, all asserted.

use std::io::Write;
use std::process::Command;

use poisson_deconv::bench::checks::{self, CheckOutcome};
use poisson_deconv::bench::THREADS_ENV;

const SEED: u64 = 20_240_601;

fn report(index: usize, outcome: &CheckOutcome) {
    let status = if outcome.passed { "PASS" } else { "FAIL" };
    // bypass the test harness capture so the lines always appear
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {index:>2} {status} {}: {}", outcome.name, outcome.detail).unwrap();
}

/// `bench` through the binary, twice, with different worker counts.
fn cli_reproducibility() -> CheckOutcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
  "intensity": {"family": "cosine", "tau": 50, "beta": 0.5},
  "error": {"family": "poisson_kernel", "rate": 0.7},
  "gamma": {"kind": "pol", "power": 2},
  "r": 3000,
  "alpha": {"kind": "exp", "rate": -1.4},
  "d": 1,
  "n_grid": [20, 60],
  "m_grid": [100, 400],
  "reps": 16,
  "seed": 7,
  "estimators": ["oracle", "partial", "full", {"fixed": 2}],
  "constants_mode": {"practical": 0.002},
  "k_max": 16
}"#,
    )
    .unwrap();
    let mut csvs = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("risk_{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_poisson-deconv"))
            .args(["bench", "--config"])
            .arg(&config)
            .arg("--output")
            .arg(&path)
            .env(THREADS_ENV, threads)
            .status()
            .unwrap();
        assert!(status.success());
        csvs.push(std::fs::read(&path).unwrap());
    }
    let same = csvs[0] == csvs[1];
    CheckOutcome {
        name: "reproducibility (cli)".into(),
        passed: same && !csvs[0].is_empty(),
        soft: false,
        detail: format!("{} bytes, identical: {same}", csvs[0].len()),
    }
}

#[test]
fn acceptance_criteria() {
    let mut results: Vec<(usize, CheckOutcome)> = vec![
        (1, checks::convolution_theorem()),
        (2, checks::rate_exponents()),
        (3, checks::variance_identities(SEED)),
        (4, checks::unbiasedness(SEED)),
        (5, checks::threshold_bound(SEED)),
        (6, checks::index_lemmas()),
        (7, checks::selection_mechanics(SEED)),
    ];
    let runs = checks::adaptive_runs(SEED).expect("adaptive benchmark runs");
    results.push((8, checks::adaptive_performance(&runs)));
    let (lib, cli) = (checks::reproducibility(SEED), cli_reproducibility());
    results.push((
        9,
        CheckOutcome {
            name: lib.name.clone(),
            passed: lib.passed && cli.passed,
            soft: false,
            detail: format!("library: {}; cli: {}", lib.detail, cli.detail),
        },
    ));
    results.push((10, checks::rate_trend(SEED)));
    for (i, r) in &results {
        report(*i, r);
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|(_, r)| !r.passed)
        .map(|(i, r)| format!("{i} ({})", r.name))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
