use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{delta, first_hit_index, running_max, DeltaVariant};
use crate::circular::{weighted_inner, weighted_norm_sq, FourierVector, WeightSequence};
use crate::error::{Error, Result};
use crate::estimate::{series_estimator, EmpiricalCoeffs};

/// Penalty constant of the partially adaptive rule, multiplied by `d`.
pub const PARTIAL_PENALTY: f64 = 165.0 / 2.0;
/// Penalty constant of the fully adaptive rule.
pub const FULL_PENALTY: f64 = 2750.0;
/// Constant in the threshold defining `M_m^α`.
pub const PARTIAL_M_THRESHOLD: f64 = 640.0;

/// Theoretical constants (`paper`), or all of them scaled by a positive factor `c`.
///
/// `Practical(c)` multiplies the penalty constants and the constants of the
/// error-sample thresholds (`640 d log(m+1)/m` and `log(m)/m`) by `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsMode {
    Paper,
    Practical(f64),
}

impl ConstantsMode {
    pub fn factor(&self) -> f64 {
        match self {
            ConstantsMode::Paper => 1.0,
            ConstantsMode::Practical(c) => *c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.factor();
        if c > 0.0 && c.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("constants factor must be positive, got {c}")))
        }
    }
}

impl std::fmt::Display for ConstantsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstantsMode::Paper => write!(f, "paper"),
            ConstantsMode::Practical(c) => write!(f, "practical({c})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    Partial,
    Full,
}

/// An index defined by an infimum. When the empirical window ended before
/// the defining condition fired, `resolved` is false and `value` is only a
/// lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBound {
    pub value: usize,
    pub resolved: bool,
}

impl IndexBound {
    fn exact(value: usize) -> Self {
        Self { value, resolved: true }
    }

    /// Scans `j = 1..=min(bound, window)`.
    fn search(bound: usize, window: usize, mut hit: impl FnMut(usize) -> bool) -> Self {
        let limit = bound.min(window);
        match (1..=limit).find(|&j| hit(j)) {
            Some(j) => Self::exact(j - 1),
            None if limit == bound => Self::exact(bound),
            None => Self {
                value: window,
                resolved: false,
            },
        }
    }
}

/// Everything a selection computed, for post-hoc audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub mode: SelectionMode,
    pub k_selected: usize,
    /// Largest admissible dimension, `K_nm^α` or `K̂_nm`.
    pub k_cap: usize,
    /// Coefficient window of the empirical quantities.
    pub window: usize,
    pub n: usize,
    pub m: usize,
    /// `N_n^α` or `N̂_n`.
    pub n_index: IndexBound,
    /// `M_m^α` or `M̂_m`.
    pub m_index: IndexBound,
    /// `Υ(λ̂_k)` for `k = 0..=k_cap`.
    pub contrast: Vec<f64>,
    pub penalty: Vec<f64>,
    /// `δ_k^α` or `δ̂_k`.
    pub delta: Vec<f64>,
    /// `Δ_k^α` or `Δ̂_k`.
    pub big_delta: Vec<f64>,
    pub ellhat0: f64,
    pub constants_mode: ConstantsMode,
}

impl SelectionResult {
    /// Penalized criterion `Υ(λ̂_k) + pen_k`.
    pub fn criterion(&self) -> Vec<f64> {
        self.contrast.iter().zip(&self.penalty).map(|(c, p)| c + p).collect()
    }
}

/// `Υ(t) = ‖t‖²_ω - 2 Re⟨reference, t⟩_ω`, where `reference` plays the role
/// of the estimator on the largest window.
pub fn contrast(t: &FourierVector, reference: &FourierVector, omega: &WeightSequence) -> f64 {
    let k = t.max_index() as i64;
    // the inner product only sees indices where t lives
    let padded = FourierVector::from_fn(t.max_index(), false, |j| {
        if j.abs() <= k {
            reference.coeff(j)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    weighted_norm_sq(t, omega) - 2.0 * weighted_inner(&padded, t, omega).re
}

/// `Υ(λ̂_k) = -Σ_{|j|<=k} ω_j |λ̂_j|²` for `k = 0..=k_cap`, computed
/// cumulatively from the estimator on the window `k_cap`.
pub fn contrast_values(emp: &EmpiricalCoeffs, omega: &WeightSequence, k_cap: usize) -> Result<Vec<f64>> {
    let est = series_estimator(emp, k_cap)?;
    let mut acc = 0.0;
    Ok((0..=k_cap as i64)
        .map(|k| {
            let add = if k == 0 {
                omega.eval(0) * est.coeff(0).norm_sqr()
            } else {
                omega.eval(k) * (est.coeff(k).norm_sqr() + est.coeff(-k).norm_sqr())
            };
            acc += add;
            -acc
        })
        .collect())
}

fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

fn require_window(emp: &EmpiricalCoeffs, k_cap: usize) -> Result<()> {
    if emp.window() < k_cap {
        return Err(Error::WindowTooSmall(format!(
            "selection cap {k_cap} exceeds the coefficient window {}",
            emp.window()
        )));
    }
    Ok(())
}

/// Partially adaptive choice `k̃`, for known `α` and `d`.
pub fn partial_adaptive(
    emp: &EmpiricalCoeffs,
    omega: &WeightSequence,
    alpha: &WeightSequence,
    d: f64,
    constants: ConstantsMode,
) -> Result<SelectionResult> {
    constants.validate()?;
    if !(d >= 1.0) {
        return Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")));
    }
    let (n, m) = (emp.n, emp.m);
    let (nf, mf) = (n as f64, m as f64);
    let c = constants.factor();

    let n_index = partial_n_index(omega, alpha, n);
    let m_threshold = c * PARTIAL_M_THRESHOLD * d * (mf + 1.0).ln() / mf;
    let m_index = first_hit_index(m, |j| alpha.eval(j as i64) < m_threshold);
    let k_cap = n_index.min(m_index);
    require_window(emp, k_cap)?;

    let big_delta = running_max((0..=k_cap as i64).map(|j| omega.eval(j) / alpha.eval(j)));
    let deltas: Vec<f64> = big_delta
        .iter()
        .enumerate()
        .map(|(k, bd)| delta(k, *bd, DeltaVariant::Partial))
        .collect();
    let scale = c * PARTIAL_PENALTY * d * emp.ellhat0().max(1.0) / nf;
    let penalty: Vec<f64> = deltas.iter().map(|dk| scale * dk).collect();
    let contrast = contrast_values(emp, omega, k_cap)?;
    let mut out = SelectionResult {
        mode: SelectionMode::Partial,
        k_selected: 0,
        k_cap,
        window: emp.window(),
        n,
        m,
        n_index: IndexBound::exact(n_index),
        m_index: IndexBound::exact(m_index),
        contrast,
        penalty,
        delta: deltas,
        big_delta,
        ellhat0: emp.ellhat0(),
        constants_mode: constants,
    };
    out.k_selected = argmin_first(&out.criterion());
    Ok(out)
}

/// `N_n^α = (inf{1<=j<=n : α_j/(2j+1) < log(n+3) ω_j⁺ / n} - 1) ∧ n`.
pub fn partial_n_index(omega: &WeightSequence, alpha: &WeightSequence, n: usize) -> usize {
    let nf = n as f64;
    let level = (nf + 3.0).ln() / nf;
    let mut omega_plus = omega.eval(0);
    first_hit_index(n, |j| {
        omega_plus = omega_plus.max(omega.eval(j as i64));
        alpha.eval(j as i64) / ((2 * j + 1) as f64) < level * omega_plus
    })
}

/// `M_m^α = (inf{1<=j<=m : α_j < 640 d log(m+1)/m} - 1) ∧ m` with the theoretical constants.
pub fn partial_m_index(alpha: &WeightSequence, d: f64, m: usize) -> usize {
    let mf = m as f64;
    let threshold = PARTIAL_M_THRESHOLD * d * (mf + 1.0).ln() / mf;
    first_hit_index(m, |j| alpha.eval(j as i64) < threshold)
}

/// Fully data-driven choice `k̂`; needs neither `α` nor `d`.
pub fn full_adaptive(
    emp: &EmpiricalCoeffs,
    omega: &WeightSequence,
    constants: ConstantsMode,
) -> Result<SelectionResult> {
    constants.validate()?;
    let (n, m) = (emp.n, emp.m);
    let (nf, mf) = (n as f64, m as f64);
    let c = constants.factor();
    let window = emp.window();
    let fsq = |j: usize| emp.fhat.coeff(j as i64).norm_sqr();

    let level = (nf + 4.0).ln() / nf;
    let mut omega_plus = omega.eval(0);
    let n_index = IndexBound::search(n, window, |j| {
        omega_plus = omega_plus.max(omega.eval(j as i64));
        fsq(j) / ((2 * j + 1) as f64) < level * omega_plus
    });
    let m_threshold = c * mf.ln() / mf;
    let m_index = IndexBound::search(m, window, |j| fsq(j) < m_threshold);
    if !n_index.resolved && !m_index.resolved {
        return Err(Error::WindowTooSmall(format!(
            "neither data-driven index resolved within the window {window}"
        )));
    }
    let k_cap = n_index.value.min(m_index.value);
    require_window(emp, k_cap)?;

    let big_delta = running_max((0..=k_cap).map(|j| {
        if emp.flag(j as i64) {
            omega.eval(j as i64) / fsq(j)
        } else {
            0.0
        }
    }));
    let deltas: Vec<f64> = big_delta
        .iter()
        .enumerate()
        .map(|(k, bd)| delta(k, *bd, DeltaVariant::Full))
        .collect();
    let scale = c * FULL_PENALTY * emp.ellhat0().max(1.0) / nf;
    let penalty: Vec<f64> = deltas.iter().map(|dk| scale * dk).collect();
    let contrast = contrast_values(emp, omega, k_cap)?;
    let mut out = SelectionResult {
        mode: SelectionMode::Full,
        k_selected: 0,
        k_cap,
        window,
        n,
        m,
        n_index,
        m_index,
        contrast,
        penalty,
        delta: deltas,
        big_delta,
        ellhat0: emp.ellhat0(),
        constants_mode: constants,
    };
    out.k_selected = argmin_first(&out.criterion());
    Ok(out)
}
