//! Monte Carlo risk experiments, rate-slope regression and event diagnostics.

pub mod checks;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::circular::WeightSequence;
use crate::error::{Error, Result};
use crate::estimate::{exact_risk, series_estimator, EmpiricalCoeffs};
use crate::models::{
    error_membership, intensity_membership, make_family, ErrorClass, FamilySpec, FunctionSpec, IntensityClass,
    Role,
};
use crate::select::{full_adaptive, oracle_dimension, partial_adaptive, ConstantsMode};
use crate::simulate::Dataset;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "POISSON_DECONV_THREADS";

/// Largest dimension the oracle scan may inspect.
const ORACLE_SCAN: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    /// The minimax oracle dimension `k_n*` of the configured classes.
    Oracle,
    Partial,
    Full,
    Fixed(usize),
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorId::Oracle => write!(f, "oracle"),
            EstimatorId::Partial => write!(f, "partial"),
            EstimatorId::Full => write!(f, "full"),
            EstimatorId::Fixed(k) => write!(f, "fixed({k})"),
        }
    }
}

fn default_omega() -> WeightSequence {
    WeightSequence::Flat
}

fn default_constants() -> ConstantsMode {
    ConstantsMode::Paper
}

fn default_k_max() -> usize {
    256
}

fn default_tail_k() -> usize {
    1024
}

/// Experiment description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub intensity: FamilySpec,
    pub error: FamilySpec,
    pub gamma: WeightSequence,
    pub r: f64,
    pub alpha: WeightSequence,
    pub d: f64,
    #[serde(default = "default_omega")]
    pub omega: WeightSequence,
    pub n_grid: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorId>,
    #[serde(default = "default_constants")]
    pub constants_mode: ConstantsMode,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_tail_k")]
    pub tail_k: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Validated, instantiated form of an [`ExperimentConfig`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub intensity: FunctionSpec,
    pub error: FunctionSpec,
    pub intensity_class: IntensityClass,
    pub error_class: ErrorClass,
    /// Both families were certified members of the configured classes.
    pub class_verified: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn instantiate(&self) -> Result<Experiment> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.m_grid.is_empty() {
            return Err(Error::InvalidParameter("n_grid and m_grid must be nonempty".into()));
        }
        if self.n_grid.iter().chain(&self.m_grid).any(|v| *v == 0) {
            return Err(Error::InvalidParameter("grid sizes must be positive".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidParameter("no estimators requested".into()));
        }
        self.constants_mode.validate()?;
        self.omega.validate()?;
        let intensity = make_family(Role::Intensity, &self.intensity)?;
        let error = make_family(Role::ErrorDensity, &self.error)?;
        let intensity_class = IntensityClass::new(self.gamma.clone(), self.r)?;
        let error_class = ErrorClass::new(self.alpha.clone(), self.d)?;
        let in_lambda = intensity_membership(&intensity, &intensity_class).map(|m| m.holds);
        let in_f = error_membership(&error, &error_class).map(|m| m.holds);
        let class_verified = matches!((in_lambda, in_f), (Ok(true), Ok(true)));
        Ok(Experiment {
            config: self.clone(),
            intensity,
            error,
            intensity_class,
            error_class,
            class_verified,
        })
    }
}

/// Aggregated risk of one estimator at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRecord {
    pub n: usize,
    pub m: usize,
    pub estimator: String,
    pub mean_risk: f64,
    pub se: f64,
    pub mean_k: f64,
    /// `k:count` pairs separated by `;`, ascending in `k`.
    pub k_histogram: String,
    pub reps: usize,
    pub seed: u64,
    pub constants_mode: String,
}

impl RiskRecord {
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        self.k_histogram
            .split(';')
            .filter(|s| !s.is_empty())
            .filter_map(|pair| {
                let (k, c) = pair.split_once(':')?;
                Some((k.parse().ok()?, c.parse().ok()?))
            })
            .collect()
    }
}

/// Coefficient window and oracle dimension used at a grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridInfo {
    pub n: usize,
    pub m: usize,
    pub window: usize,
    pub oracle_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub records: Vec<RiskRecord>,
    pub grid: Vec<GridInfo>,
    pub class_verified: bool,
    pub notes: Vec<String>,
}

impl ExperimentOutput {
    pub fn record(&self, n: usize, m: usize, estimator: EstimatorId) -> Option<&RiskRecord> {
        let id = estimator.to_string();
        self.records
            .iter()
            .find(|r| r.n == n && r.m == m && r.estimator == id)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn env_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|t| *t > 0)
}

/// Runs the experiment on a pool sized by [`THREADS_ENV`] (rayon's default
/// otherwise) and writes the CSV to `config.output` if set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let out = run_experiment_with_threads(cfg, env_threads())?;
    if let Some(path) = &cfg.output {
        out.write_csv(File::create(path)?)?;
    }
    Ok(out)
}

/// Runs the experiment on `threads` workers without writing any file. The
/// result does not depend on `threads`.
pub fn run_experiment_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentOutput> {
    let exp = cfg.instantiate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| execute(&exp))
}

struct Outcome {
    risk: f64,
    k: usize,
}

fn execute(exp: &Experiment) -> Result<ExperimentOutput> {
    let cfg = &exp.config;
    let mut records = Vec::new();
    let mut grid = Vec::new();
    let mut notes = Vec::new();
    if !exp.class_verified {
        notes.push("class-unverified: a family is not a certified member of its configured class".to_string());
    }
    let points = cfg
        .n_grid
        .iter()
        .flat_map(|&n| cfg.m_grid.iter().map(move |&m| (n, m)));
    for (grid_index, (n, m)) in points.enumerate() {
        let window = n.min(m).min(cfg.k_max);
        let oracle = oracle_dimension(&cfg.omega, &cfg.gamma, &cfg.alpha, n, ORACLE_SCAN)?;
        let oracle_k = oracle.k_star.min(window);
        let tail_k = cfg.tail_k.max(window);
        let per_rep: Vec<Vec<Outcome>> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let ds = Dataset::simulate(&exp.intensity, &exp.error, n, m, cfg.seed, grid_index, rep)?;
                let emp = EmpiricalCoeffs::from_dataset(&ds, window)?;
                cfg.estimators
                    .iter()
                    .map(|id| {
                        let k = match id {
                            EstimatorId::Oracle => oracle_k,
                            EstimatorId::Fixed(k) => *k,
                            EstimatorId::Partial => {
                                partial_adaptive(&emp, &cfg.omega, &cfg.alpha, cfg.d, cfg.constants_mode)?.k_selected
                            }
                            EstimatorId::Full => full_adaptive(&emp, &cfg.omega, cfg.constants_mode)?.k_selected,
                        };
                        let est = series_estimator(&emp, k)?;
                        let risk = exact_risk(&est, &exp.intensity, &cfg.omega, tail_k)?.total;
                        Ok(Outcome { risk, k })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;

        for (e, id) in cfg.estimators.iter().enumerate() {
            let rec = aggregate(n, m, *id, cfg, per_rep.iter().map(|o| &o[e]));
            if matches!(id, EstimatorId::Partial | EstimatorId::Full) && rec.mean_k == 0.0 {
                let note = format!(
                    "{id} selected k = 0 in all {} replications at n = {n}, m = {m} with {} constants",
                    cfg.reps, cfg.constants_mode
                );
                eprintln!("note: {note}");
                notes.push(note);
            }
            records.push(rec);
        }
        grid.push(GridInfo { n, m, window, oracle_k });
    }
    Ok(ExperimentOutput {
        records,
        grid,
        class_verified: exp.class_verified,
        notes,
    })
}

fn aggregate<'a>(
    n: usize,
    m: usize,
    id: EstimatorId,
    cfg: &ExperimentConfig,
    outcomes: impl Iterator<Item = &'a Outcome>,
) -> RiskRecord {
    let outcomes: Vec<&Outcome> = outcomes.collect();
    let reps = outcomes.len() as f64;
    let risks: Vec<f64> = outcomes.iter().map(|o| o.risk).collect();
    let (mean_risk, se) = mean_se(&risks);
    let mean_k = outcomes.iter().map(|o| o.k as f64).sum::<f64>() / reps;
    let mut hist = BTreeMap::new();
    for o in &outcomes {
        *hist.entry(o.k).or_insert(0usize) += 1;
    }
    let k_histogram = hist
        .iter()
        .map(|(k, c)| format!("{k}:{c}"))
        .collect::<Vec<_>>()
        .join(";");
    RiskRecord {
        n,
        m,
        estimator: id.to_string(),
        mean_risk,
        se,
        mean_k,
        k_histogram,
        reps: outcomes.len(),
        seed: cfg.seed,
        constants_mode: cfg.constants_mode.to_string(),
    }
}

/// Sample mean and its standard error (zero for a single value).
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// Half-width of the 95% confidence interval for the slope.
    pub half_width: f64,
    pub intercept: f64,
}

/// Least-squares slope of `log value` against `log size`.
pub fn slope_regression(sizes: &[f64], values: &[f64]) -> Result<SlopeFit> {
    if sizes.len() != values.len() {
        return Err(Error::InvalidParameter("sizes and values differ in length".into()));
    }
    if sizes.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 points, got {}",
            sizes.len()
        )));
    }
    if let Some(v) = sizes.iter().chain(values).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("nonpositive value {v} in slope regression")));
    }
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = k - 2.0;
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .inverse_cdf(0.975);
    let half_width = t * (rss / dof / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        half_width,
        intercept,
    })
}

/// Per-index Monte Carlo summaries of the empirical coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientDiagnostics {
    pub j: usize,
    /// `[λ]_j [f]_j`.
    pub target: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub se_re: f64,
    pub se_im: f64,
    /// Sample variance of `ℓ̂_j`, i.e. of the residual `ξ_j`.
    pub ell_var: f64,
    /// `[λ]_0 / n`.
    pub ell_var_target: f64,
    /// Sample variance of `f̂_j`.
    pub f_var: f64,
    /// `(1 - |[f]_j|²) / m`.
    pub f_var_target: f64,
    /// Frequency of `|f̂_j|² < 1/m`.
    pub omega_fail: f64,
    pub omega_fail_se: f64,
    /// `min{1, 4d/(m α_j)}`.
    pub omega_bound: f64,
}

impl CoefficientDiagnostics {
    pub fn ell_var_ratio(&self) -> f64 {
        self.ell_var / self.ell_var_target
    }

    /// `None` where the target variance vanishes.
    pub fn f_var_ratio(&self) -> Option<f64> {
        (self.f_var_target > 0.0).then(|| self.f_var / self.f_var_target)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub n: usize,
    pub m: usize,
    pub reps: usize,
    /// Index range of the second event.
    pub m_index: usize,
    /// Frequency of `ℓ̂₀ ∨ 1` leaving `[½, 2]·(ℓ₀ ∨ 1)`.
    pub xi1_fail: f64,
    /// Frequency of a relative-error or threshold failure at some `|j| <= m_index`.
    pub xi2_fail: f64,
    pub coefficients: Vec<CoefficientDiagnostics>,
}

/// Monte Carlo frequencies of the concentration events and moments of the
/// empirical coefficients for `j = 0..=j_max` at one `(n, m)`.
///
/// `m_index` is `M_m^α` with the threshold scaled by the configured constants.
pub fn event_diagnostics(cfg: &ExperimentConfig, n: usize, m: usize, j_max: usize) -> Result<DiagnosticsRecord> {
    let exp = cfg.instantiate()?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = env_threads() {
            b = b.num_threads(t);
        }
        b.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
    };
    let c = cfg.constants_mode.factor();
    let mf = m as f64;
    let threshold = c * crate::select::PARTIAL_M_THRESHOLD * cfg.d * (mf + 1.0).ln() / mf;
    let m_index = crate::select::first_hit_index(m, |j| cfg.alpha.eval(j as i64) < threshold);
    let window = j_max.max(m_index);
    let lambda0 = exp.intensity.coeff(0);

    let reps: Vec<EmpiricalCoeffs> = pool.install(|| {
        (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let ds = Dataset::simulate(&exp.intensity, &exp.error, n, m, cfg.seed, 0, rep)?;
                EmpiricalCoeffs::from_dataset(&ds, window)
            })
            .collect::<Result<_>>()
    })?;
    let r = reps.len() as f64;

    let xi1_fail = reps
        .iter()
        .filter(|e| {
            let hat = e.ellhat0().max(1.0);
            let truth = lambda0.max(1.0);
            !(truth / 2.0 <= hat && hat <= 2.0 * truth)
        })
        .count() as f64
        / r;
    let xi2_fail = reps
        .iter()
        .filter(|e| {
            (0..=m_index as i64).any(|j| {
                let f = exp.error.coeff(j);
                let fh = e.fhat.coeff(j);
                let rel = (fh.inv() - 1.0 / f).norm() > 1.0 / (2.0 * f.abs());
                rel || fh.norm() < 1.0 / mf
            })
        })
        .count() as f64
        / r;

    let coefficients = (0..=j_max as i64)
        .map(|j| {
            let re: Vec<f64> = reps.iter().map(|e| e.ellhat.coeff(j).re).collect();
            let im: Vec<f64> = reps.iter().map(|e| e.ellhat.coeff(j).im).collect();
            let (mean_re, se_re) = mean_se(&re);
            let (mean_im, se_im) = mean_se(&im);
            let ell_var = (se_re.powi(2) + se_im.powi(2)) * r;
            let fre: Vec<f64> = reps.iter().map(|e| e.fhat.coeff(j).re).collect();
            let fim: Vec<f64> = reps.iter().map(|e| e.fhat.coeff(j).im).collect();
            let f_var = (mean_se(&fre).1.powi(2) + mean_se(&fim).1.powi(2)) * r;
            let fj = exp.error.coeff(j);
            let fails: Vec<f64> = reps.iter().map(|e| f64::from(u8::from(!e.flag(j)))).collect();
            let omega_fail = fails.iter().sum::<f64>() / r;
            let omega_fail_se = (omega_fail * (1.0 - omega_fail) / r).sqrt();
            CoefficientDiagnostics {
                j: j as usize,
                target: exp.intensity.coeff(j) * fj,
                mean_re,
                mean_im,
                se_re,
                se_im,
                ell_var,
                ell_var_target: lambda0 / n as f64,
                f_var,
                f_var_target: (1.0 - fj * fj) / mf,
                omega_fail,
                omega_fail_se,
                omega_bound: (4.0 * cfg.d / (mf * cfg.alpha.eval(j))).min(1.0),
            }
        })
        .collect();
    Ok(DiagnosticsRecord {
        n,
        m,
        reps: cfg.reps,
        m_index,
        xi1_fail,
        xi2_fail,
        coefficients,
    })
}

/// Writes a gnuplot script plotting mean risk against `n` for every
/// estimator in `csv_path`.
pub fn emit_gnuplot(csv_path: &Path, records: &[RiskRecord], script: &Path) -> Result<()> {
    let mut ids: Vec<&str> = records.iter().map(|r| r.estimator.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    let csv = csv_path.display();
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set logscale xy\nset xlabel 'n'\nset ylabel 'mean risk'\nset key outside\n");
    let plots: Vec<String> = ids
        .iter()
        .map(|id| {
            format!("'{csv}' using (strcol(3) eq '{id}' ? $1 : 1/0):5:6 skip 1 with yerrorlines title '{id}'")
        })
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    std::fs::write(script, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_ids_round_trip() {
        let ids: Vec<EstimatorId> = serde_json::from_str(r#"["oracle","partial","full",{"fixed":3}]"#).unwrap();
        assert_eq!(
            ids,
            vec![
                EstimatorId::Oracle,
                EstimatorId::Partial,
                EstimatorId::Full,
                EstimatorId::Fixed(3)
            ]
        );
        assert_eq!(EstimatorId::Fixed(3).to_string(), "fixed(3)");
    }

    #[test]
    fn exact_power_law_slope() {
        let sizes = [1e2, 1e3, 1e4, 1e5, 1e6];
        let values: Vec<f64> = sizes.iter().map(|n: &f64| n.powf(-0.4)).collect();
        let fit = slope_regression(&sizes, &values).unwrap();
        assert!((fit.slope + 0.4).abs() < 1e-12);
        assert!(fit.half_width < 1e-12);
        assert!(slope_regression(&sizes[..3], &values[..3]).is_err());
        assert!(slope_regression(&sizes, &[1.0, 0.0, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn mean_and_standard_error() {
        assert_eq!(mean_se(&[3.0]), (3.0, 0.0));
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn histogram_parsing() {
        let rec = RiskRecord {
            n: 1,
            m: 1,
            estimator: "full".into(),
            mean_risk: 0.0,
            se: 0.0,
            mean_k: 0.0,
            k_histogram: "0:3;2:7".into(),
            reps: 10,
            seed: 0,
            constants_mode: "paper".into(),
        };
        let h = rec.histogram();
        assert_eq!(h.get(&0), Some(&3));
        assert_eq!(h.get(&2), Some(&7));
    }
}
