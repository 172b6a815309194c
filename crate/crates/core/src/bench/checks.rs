//! The invariant and diagnostic suite run by `poisson-deconv check`.
//!
//! Every check returns a [`CheckOutcome`]; none of them panics on a failed
//! property.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{event_diagnostics, run_experiment_with_threads, slope_regression, EstimatorId, ExperimentConfig};
use crate::circular::{convolve, quadrature_coefficients, WeightSequence};
use crate::error::Result;
use crate::estimate::{series_estimator, EmpiricalCoeffs};
use crate::models::{make_family, wrap_unit, FamilySpec, FunctionSpec, Role};
use crate::select::{
    contrast, contrast_values, full_adaptive, lemma_coefficient_floor, lemma_threshold_tail, lemma_variance_budget,
    oracle_dimension, partial_adaptive, partial_m_index, partial_n_index, phi_rate, ConstantsMode, RateKind,
    Scenario,
};
use crate::simulate::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// A failure is reported but not counted.
    pub soft: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            soft: false,
            detail,
        }
    }

    fn soft(mut self) -> Self {
        self.soft = true;
        self
    }

    /// Counts towards the failure total.
    pub fn failed(&self) -> bool {
        !self.passed && !self.soft
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

/// Practical scaling used for the adaptive benchmark.
pub const PRACTICAL_FACTOR: f64 = 1.0 / 500.0;

fn intensity(spec: FamilySpec) -> FunctionSpec {
    make_family(Role::Intensity, &spec).expect("valid intensity")
}

fn error_density(spec: FamilySpec) -> FunctionSpec {
    make_family(Role::ErrorDensity, &spec).expect("valid error density")
}

fn cosine_intensity() -> FamilySpec {
    FamilySpec::Cosine {
        tau: Some(50.0),
        beta: 0.5,
    }
}

fn wrapped_cauchy() -> FamilySpec {
    FamilySpec::PoissonKernel {
        rate: Some(0.7),
        decay: None,
        tau: None,
    }
}

/// Cosine intensity seen through wrapped Cauchy noise.
pub fn cosine_cauchy_config(n: usize, m: usize, reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        intensity: cosine_intensity(),
        error: wrapped_cauchy(),
        gamma: WeightSequence::pol_growth(1.0),
        r: 3000.0,
        alpha: WeightSequence::exp_decay(0.7),
        d: 1.0,
        omega: WeightSequence::Flat,
        n_grid: vec![n],
        m_grid: vec![m],
        reps,
        seed,
        estimators: vec![EstimatorId::Full],
        constants_mode: ConstantsMode::Paper,
        k_max: 8,
        tail_k: 64,
        output: None,
    }
}

/// Polynomially decaying intensity and error density.
pub fn young_pol_config(n_grid: Vec<usize>, m: usize, reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        intensity: FamilySpec::YoungPol {
            tau: Some(50.0),
            q: 2.0,
            truncation: 64,
        },
        error: FamilySpec::YoungPol {
            tau: None,
            q: 2.0,
            truncation: 64,
        },
        gamma: WeightSequence::pol_growth(1.0),
        r: 10_000.0,
        alpha: WeightSequence::pol_decay(2.0),
        d: 16.0,
        omega: WeightSequence::Flat,
        n_grid,
        m_grid: vec![m],
        reps,
        seed,
        estimators: vec![EstimatorId::Oracle],
        constants_mode: ConstantsMode::Paper,
        k_max: 16,
        tail_k: 64,
        output: None,
    }
}

/// Coefficient products against a time-domain quadrature of the convolution,
/// for every intensity and error family, `|j| <= 32`.
pub fn convolution_theorem() -> CheckOutcome {
    const K: usize = 32;
    const NODES: usize = 512;
    let intensities = [
        FamilySpec::Uniform { tau: Some(50.0) },
        FamilySpec::Cosine {
            tau: Some(50.0),
            beta: 0.9,
        },
        FamilySpec::PoissonKernel {
            rate: Some(0.5),
            decay: None,
            tau: Some(50.0),
        },
        FamilySpec::YoungPol {
            tau: Some(50.0),
            q: 1.5,
            truncation: 64,
        },
    ];
    let errors = [
        FamilySpec::Uniform { tau: None },
        FamilySpec::Cosine { tau: None, beta: 0.5 },
        wrapped_cauchy(),
        FamilySpec::YoungPol {
            tau: None,
            q: 2.0,
            truncation: 64,
        },
    ];
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        for ls in &intensities {
            let lambda = make_family(Role::Intensity, ls)?;
            for fs in &errors {
                let f = make_family(Role::ErrorDensity, fs)?;
                let f_values: Vec<f64> = (0..NODES).map(|i| f.eval(i as f64 / NODES as f64)).collect();
                let g = |t: f64| {
                    f_values
                        .iter()
                        .enumerate()
                        .map(|(i, fv)| lambda.eval(wrap_unit(t - i as f64 / NODES as f64)) * fv)
                        .sum::<f64>()
                        / NODES as f64
                };
                let numeric = quadrature_coefficients(g, K, NODES)?;
                let product = convolve(&lambda.coefficients(K), &f.coefficients(K));
                for j in -(K as i64)..=K as i64 {
                    worst = worst.max((numeric.coeff(j) - product.coeff(j)).norm());
                }
            }
        }
        let secs = start.elapsed().as_secs_f64();
        Ok((
            worst <= 1e-8 && secs < 5.0,
            format!("max deviation {worst:.2e} over 16 pairs, {secs:.2} s"),
        ))
    };
    CheckOutcome::from_result("convolution theorem", run())
}

/// Log-log slopes of the rate functionals against the closed-form exponents.
pub fn rate_exponents() -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let sizes: Vec<usize> = (3..=7).map(|e| 10usize.pow(e)).collect();
        let xs: Vec<f64> = sizes.iter().map(|n| *n as f64).collect();
        let (omega, gamma, alpha) = Scenario {
            gamma: RateKind::Pol,
            alpha: RateKind::Pol,
        }
        .weights(0.0, 1.0, 1.0);
        let psi: Vec<f64> = sizes
            .iter()
            .map(|&n| oracle_dimension(&omega, &gamma, &alpha, n, 1_000_000).map(|o| o.psi))
            .collect::<Result<_>>()?;
        let phi: Vec<f64> = sizes
            .iter()
            .map(|&m| phi_rate(&omega, &gamma, &alpha, m, 1_000_000))
            .collect::<Result<_>>()?;
        let psi_fit = slope_regression(&xs, &psi)?;
        let phi_fit = slope_regression(&xs, &phi)?;

        let (omega, gamma, alpha) = Scenario {
            gamma: RateKind::Exp,
            alpha: RateKind::Pol,
        }
        .weights(0.0, 1.0, 1.0);
        let ns: Vec<usize> = (0..=6).map(|i| 10f64.powf(4.0 + 0.5 * i as f64).round() as usize).collect();
        let scaled: Vec<f64> = ns
            .iter()
            .map(|&n| {
                oracle_dimension(&omega, &gamma, &alpha, n, 1_000_000)
                    .map(|o| o.psi * n as f64 / (n as f64).ln().powi(3))
            })
            .collect::<Result<_>>()?;
        let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
        let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
        let secs = start.elapsed().as_secs_f64();
        let ok = (psi_fit.slope + 0.4).abs() <= 0.05
            && (phi_fit.slope + 1.0).abs() <= 1e-6
            && hi / lo < 2.0
            && secs < 30.0;
        Ok((
            ok,
            format!(
                "psi slope {:.4}, phi slope {:.8}, exp/pol variation factor {:.3}, {secs:.2} s",
                psi_fit.slope,
                phi_fit.slope,
                hi / lo
            ),
        ))
    };
    CheckOutcome::from_result("rate exponents", run())
}

/// Empirical variances of `ℓ̂_j` and `f̂_j` against their exact values.
pub fn variance_identities(seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let diag = event_diagnostics(&cosine_cauchy_config(50, 200, 5000, seed), 50, 200, 4)?;
        let mut worst_ell: f64 = 0.0;
        let mut worst_f: f64 = 0.0;
        let mut f0 = 0.0;
        for c in &diag.coefficients {
            worst_ell = worst_ell.max((c.ell_var_ratio() - 1.0).abs());
            match c.f_var_ratio() {
                Some(r) => worst_f = worst_f.max((r - 1.0).abs()),
                None => f0 = c.f_var,
            }
        }
        let secs = start.elapsed().as_secs_f64();
        Ok((
            worst_ell <= 0.1 && worst_f <= 0.1 && f0 == 0.0 && secs < 60.0,
            format!(
                "max relative deviation: ell {worst_ell:.4}, f {worst_f:.4}; Var f̂_0 = {f0}; {secs:.2} s"
            ),
        ))
    };
    CheckOutcome::from_result("exact variance identities", run())
}

/// Mean of `ℓ̂_j` against `[λ]_j [f]_j`, real and imaginary parts separately.
pub fn unbiasedness(seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let diag = event_diagnostics(&cosine_cauchy_config(50, 200, 2000, seed), 50, 200, 4)?;
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for c in &diag.coefficients {
            for (dev, se) in [((c.mean_re - c.target).abs(), c.se_re), (c.mean_im.abs(), c.se_im)] {
                if se == 0.0 {
                    ok &= dev < 1e-12;
                } else {
                    worst = worst.max(dev / se);
                    ok &= dev <= 4.0 * se;
                }
            }
        }
        Ok((ok, format!("largest deviation {worst:.2} SE over |j| <= 4")))
    };
    CheckOutcome::from_result("unbiasedness", run())
}

/// Frequency of `Ω_j^∁` against `min{1, 4d/(m α_j)}`.
pub fn threshold_bound(seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        for m in [100, 1000, 10_000] {
            let diag = event_diagnostics(&cosine_cauchy_config(1, m, 2000, seed), 1, m, 4)?;
            let mut slack = f64::INFINITY;
            for c in &diag.coefficients {
                let margin = c.omega_bound + 4.0 * c.omega_fail_se - c.omega_fail;
                slack = slack.min(margin);
                ok &= margin >= 0.0;
            }
            parts.push(format!("m={m}: min slack {slack:.4}"));
        }
        Ok((ok, parts.join(", ")))
    };
    CheckOutcome::from_result("threshold probability bound", run())
}

/// Deterministic facts behind the partially adaptive rule.
pub fn index_lemmas() -> CheckOutcome {
    let start = Instant::now();
    let flat = WeightSequence::Flat;
    let alphas = [WeightSequence::pol_decay(1.0), WeightSequence::exp_decay(0.7)];
    let mut parts = Vec::new();
    let mut ok = true;
    for a in &alphas {
        let budget = lemma_variance_budget(&flat, a, 1..=10_000);
        let tail = lemma_threshold_tail(a, 1.0, 1..=100_000);
        ok &= budget.passed() && tail.passed();
        parts.push(format!(
            "{a}: (a) worst {:.3}, (b) {} checked / {} vacuous",
            budget.worst_ratio, tail.checked, tail.vacuous
        ));
    }
    let f = error_density(wrapped_cauchy());
    let floor = lemma_coefficient_floor(&alphas[1], 1.0, &f, 1..=100_000);
    ok &= floor.passed();
    parts.push(format!("(c) {} checked / {} vacuous", floor.checked, floor.vacuous));
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    parts.push(format!("{secs:.2} s"));
    CheckOutcome::new("index lemmas", ok, parts.join("; "))
}

/// Contrast identity, projection optimality, selection bounds and the
/// empty-infimum edge cases.
pub fn selection_mechanics(seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let lambda = intensity(FamilySpec::Cosine {
            tau: Some(5.0),
            beta: 0.5,
        });
        let f = error_density(wrapped_cauchy());
        let omega = WeightSequence::pol_growth(1.0);
        let alpha = WeightSequence::exp_decay(0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut identity_gap: f64 = 0.0;
        let mut projection_ok = true;
        let mut bounds_ok = true;
        for rep in 0..100 {
            let n = rng.random_range(1..=60);
            let m = rng.random_range(1..=60);
            let ds = Dataset::simulate(&lambda, &f, n, m, seed, 1, rep)?;
            let window = n.min(m);
            let emp = EmpiricalCoeffs::from_dataset(&ds, window)?;
            let reference = series_estimator(&emp, window)?;
            let values = contrast_values(&emp, &omega, window)?;
            for k in 0..=window.min(6) {
                let est = series_estimator(&emp, k)?;
                let base = contrast(&est, &reference, &omega);
                identity_gap = identity_gap.max((base - values[k]).abs());
                for j in -(k as i64)..=k as i64 {
                    for delta in [
                        Complex64::new(0.1, 0.0),
                        Complex64::new(-0.1, 0.0),
                        Complex64::new(0.0, 0.1),
                        Complex64::new(0.0, -0.1),
                    ] {
                        let mut t = est.clone();
                        t.set(j, est.coeff(j) + delta)?;
                        projection_ok &= contrast(&t, &reference, &omega) > base;
                    }
                }
            }
            for mode in [ConstantsMode::Paper, ConstantsMode::Practical(PRACTICAL_FACTOR)] {
                for sel in [
                    partial_adaptive(&emp, &omega, &alpha, 1.0, mode)?,
                    full_adaptive(&emp, &omega, mode)?,
                ] {
                    bounds_ok &= sel.k_selected <= sel.k_cap && sel.k_cap <= n.min(m);
                }
            }
        }

        let flat = WeightSequence::Flat;
        let pol = WeightSequence::pol_decay(1.0);
        let ds = Dataset::simulate(&lambda, &f, 5, 1, seed, 2, 0)?;
        let emp = EmpiricalCoeffs::from_dataset(&ds, 1)?;
        let full_m1 = full_adaptive(&emp, &flat, ConstantsMode::Paper)?;
        let ds = Dataset::simulate(&lambda, &f, 1, 5, seed, 3, 0)?;
        let emp = EmpiricalCoeffs::from_dataset(&ds, 1)?;
        let full_n1 = full_adaptive(&emp, &flat, ConstantsMode::Paper)?;
        let edges_ok = partial_m_index(&pol, 1.0, 1) == 0
            && partial_n_index(&flat, &pol, 1) == 0
            && full_m1.m_index.value == 1
            && full_m1.m_index.resolved
            && full_n1.n_index.value == 0
            && full_n1.k_selected == 0;

        Ok((
            identity_gap < 1e-10 && projection_ok && bounds_ok && edges_ok,
            format!(
                "identity gap {identity_gap:.1e}, projection {projection_ok}, bounds {bounds_ok}, edge cases {edges_ok}"
            ),
        ))
    };
    CheckOutcome::from_result("selection mechanics", run())
}

/// Results of the adaptive benchmark, shared by several checks.
pub struct AdaptiveRuns {
    pub practical: super::ExperimentOutput,
    pub paper: super::ExperimentOutput,
    pub seconds: f64,
}

pub const ADAPTIVE_N: usize = 500;
pub const ADAPTIVE_M: usize = 10_000;
pub const FIXED_GRID: usize = 8;

pub fn adaptive_runs(seed: u64) -> Result<AdaptiveRuns> {
    let start = Instant::now();
    let mut cfg = cosine_cauchy_config(ADAPTIVE_N, ADAPTIVE_M, 300, seed);
    cfg.estimators = vec![EstimatorId::Oracle, EstimatorId::Partial, EstimatorId::Full];
    cfg.estimators.extend((0..=FIXED_GRID).map(EstimatorId::Fixed));
    cfg.constants_mode = ConstantsMode::Practical(PRACTICAL_FACTOR);
    let practical = run_experiment_with_threads(&cfg, super::env_threads())?;
    cfg.estimators = vec![EstimatorId::Partial, EstimatorId::Full];
    cfg.constants_mode = ConstantsMode::Paper;
    let paper = run_experiment_with_threads(&cfg, super::env_threads())?;
    Ok(AdaptiveRuns {
        practical,
        paper,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn best_fixed(out: &super::ExperimentOutput, n: usize, m: usize, grid: usize) -> Option<(usize, f64, f64)> {
    (0..=grid)
        .filter_map(|k| out.record(n, m, EstimatorId::Fixed(k)).map(|r| (k, r.mean_risk, r.se)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Fully adaptive risk within a factor 3 of the best fixed dimension under
/// practical constants, and the collapse to `k = 0` under the theoretical constants.
pub fn adaptive_performance(runs: &AdaptiveRuns) -> CheckOutcome {
    let (n, m) = (ADAPTIVE_N, ADAPTIVE_M);
    let full = runs.practical.record(n, m, EstimatorId::Full);
    let paper_full = runs.paper.record(n, m, EstimatorId::Full);
    let (Some(full), Some(paper_full), Some((k_best, best, _))) =
        (full, paper_full, best_fixed(&runs.practical, n, m, FIXED_GRID))
    else {
        return CheckOutcome::new("adaptive performance", false, "missing records".into());
    };
    let within = full.mean_risk <= 3.0 * best + 4.0 * full.se;
    let collapsed = paper_full.histogram().keys().all(|k| *k == 0);
    let reported = runs.paper.notes.iter().any(|s| s.starts_with("full selected k = 0"));
    CheckOutcome::new(
        "adaptive performance",
        within && collapsed && reported && runs.seconds < 600.0,
        format!(
            "full {:.3} (se {:.3}, k {}) vs best fixed k={k_best} {best:.3}; paper constants: k histogram {} ({}); {:.1} s",
            full.mean_risk,
            full.se,
            full.k_histogram,
            paper_full.k_histogram,
            if reported { "collapse reported" } else { "collapse not reported" },
            runs.seconds
        ),
    )
}

/// Fixed-dimension risk never falls below its squared bias.
pub fn risk_decomposition(runs: &AdaptiveRuns) -> CheckOutcome {
    let lambda = intensity(cosine_intensity());
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for k in 0..=FIXED_GRID {
        let Some(r) = runs.practical.record(ADAPTIVE_N, ADAPTIVE_M, EstimatorId::Fixed(k)) else {
            return CheckOutcome::new("risk decomposition", false, format!("missing fixed({k})"));
        };
        let bias: f64 = (k as i64 + 1..=64).map(|j| 2.0 * lambda.coeff(j).powi(2)).sum();
        let margin = r.mean_risk - bias + 4.0 * r.se;
        worst = worst.min(margin);
        ok &= margin >= 0.0;
    }
    CheckOutcome::new("risk decomposition", ok, format!("smallest margin {worst:.4}"))
}

/// Soft comparisons of the oracle and adaptive dimensions with the best
/// fixed one.
pub fn oracle_comparisons(runs: &AdaptiveRuns) -> Vec<CheckOutcome> {
    let (n, m) = (ADAPTIVE_N, ADAPTIVE_M);
    let Some((_, best, best_se)) = best_fixed(&runs.practical, n, m, FIXED_GRID) else {
        return vec![CheckOutcome::new("oracle dominance", false, "missing records".into())];
    };
    let mut out = Vec::new();
    if let Some(o) = runs.practical.record(n, m, EstimatorId::Oracle) {
        out.push(CheckOutcome::new(
            "oracle dominance (soft)",
            o.mean_risk <= 1.05 * best + 4.0 * best_se.max(o.se),
            format!("oracle {:.3} (k {}) vs best fixed {best:.3}", o.mean_risk, o.k_histogram),
        )
        .soft());
    }
    if let Some(p) = runs.practical.record(n, m, EstimatorId::Partial) {
        out.push(CheckOutcome::new(
            "partial oracle inequality (soft)",
            p.mean_risk <= 3.0 * best + 4.0 * p.se,
            format!("partial {:.3} (k {}) vs best fixed {best:.3}", p.mean_risk, p.k_histogram),
        )
        .soft());
    }
    out
}

/// Identical CSV bytes from one and from four workers.
pub fn reproducibility(seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut cfg = cosine_cauchy_config(40, 200, 24, seed);
        cfg.n_grid = vec![20, 40];
        cfg.estimators = vec![EstimatorId::Full, EstimatorId::Fixed(1), EstimatorId::Oracle];
        cfg.constants_mode = ConstantsMode::Practical(PRACTICAL_FACTOR);
        let mut bytes = Vec::new();
        for threads in [1, 4] {
            let mut buf = Vec::new();
            run_experiment_with_threads(&cfg, Some(threads))?.write_csv(&mut buf)?;
            bytes.push(buf);
        }
        Ok((
            bytes[0] == bytes[1],
            format!("{} bytes, identical: {}", bytes[0].len(), bytes[0] == bytes[1]),
        ))
    };
    CheckOutcome::from_result("reproducibility", run())
}

/// Oracle risk decreasing in `n` for the polynomial configuration.
pub fn rate_trend(seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let ns = vec![100, 400, 1600];
        let cfg = young_pol_config(ns.clone(), 10_000, 300, seed);
        let out = run_experiment_with_threads(&cfg, super::env_threads())?;
        let risks: Vec<f64> = ns
            .iter()
            .map(|&n| out.record(n, 10_000, EstimatorId::Oracle).map_or(f64::NAN, |r| r.mean_risk))
            .collect();
        let ks: Vec<usize> = out.grid.iter().map(|g| g.oracle_k).collect();
        let decreasing = risks.windows(2).all(|w| w[1] < w[0]);
        Ok((
            decreasing,
            format!(
                "oracle risks {:?} at k* {ks:?}, class verified: {}",
                risks.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
                out.class_verified
            ),
        ))
    };
    CheckOutcome::from_result("rate trend", run())
}

/// The whole suite in a fixed order.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    let mut out = vec![
        convolution_theorem(),
        rate_exponents(),
        variance_identities(seed),
        unbiasedness(seed),
        threshold_bound(seed),
        index_lemmas(),
        selection_mechanics(seed),
    ];
    match adaptive_runs(seed) {
        Ok(runs) => {
            out.push(adaptive_performance(&runs));
            out.push(risk_decomposition(&runs));
            out.extend(oracle_comparisons(&runs));
        }
        Err(e) => out.push(CheckOutcome::new("adaptive performance", false, format!("error: {e}"))),
    }
    out.push(reproducibility(seed));
    out.push(rate_trend(seed));
    out
}
