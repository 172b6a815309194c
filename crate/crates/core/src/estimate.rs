//! Empirical Fourier coefficients, the thresholded series estimator and exact
//! weighted risk against a known intensity.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circular::{FourierVector, WeightSequence};
use crate::error::{Error, Result};
use crate::models::FunctionSpec;
use crate::simulate::{Dataset, PointPattern};

/// Steps between exact re-evaluations of the phase recurrence.
const RESYNC: usize = 64;

/// Adds `e_j(-y)` for `j = 0..=k` into `acc`.
fn accumulate_phases(acc: &mut [Complex64], y: f64) {
    let step = Complex64::from_polar(1.0, -TAU * y);
    let mut w = Complex64::new(1.0, 0.0);
    for (j, slot) in acc.iter_mut().enumerate() {
        if j % RESYNC == 0 && j > 0 {
            w = Complex64::from_polar(1.0, -TAU * (j as f64 * y).rem_euclid(1.0));
        }
        *slot += w;
        w *= step;
    }
}

/// `ℓ̂_j = n⁻¹ Σ_i Σ_{y ∈ N_i} e_j(-y)` for `|j| <= k`.
pub fn empirical_ell(processes: &[PointPattern], k: usize) -> Result<FourierVector> {
    if processes.is_empty() {
        return Err(Error::InvalidParameter("need at least one process".into()));
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); k + 1];
    let mut count = 0usize;
    for p in processes {
        for &y in p.points() {
            accumulate_phases(&mut acc, y);
        }
        count += p.len();
    }
    let n = processes.len() as f64;
    acc.iter_mut().for_each(|c| *c /= n);
    // the mean count is exact; no phase rounding at j = 0
    acc[0] = Complex64::new(count as f64 / n, 0.0);
    Ok(FourierVector::hermitian(&acc))
}

/// `f̂_j = m⁻¹ Σ_i e_j(-Y_i)` and the threshold flags `|f̂_j|² >= 1/m` for `j = 0..=k`.
pub fn empirical_f(errors: &[f64], k: usize) -> Result<(FourierVector, Vec<bool>)> {
    if errors.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = errors.len() as f64;
    let mut acc = vec![Complex64::new(0.0, 0.0); k + 1];
    for &y in errors {
        accumulate_phases(&mut acc, y);
    }
    acc.iter_mut().for_each(|c| *c /= m);
    acc[0] = Complex64::new(1.0, 0.0);
    let flags = acc.iter().map(|c| c.norm_sqr() >= 1.0 / m).collect();
    Ok((FourierVector::hermitian(&acc), flags))
}

/// Empirical coefficients of one dataset on the window `|j| <= K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCoeffs {
    pub ellhat: FourierVector,
    pub fhat: FourierVector,
    /// Threshold indicator for `j = 0..=K`; symmetric in `j`.
    pub omega_flags: Vec<bool>,
    pub n: usize,
    pub m: usize,
}

impl EmpiricalCoeffs {
    pub fn new(processes: &[PointPattern], errors: &[f64], window: usize) -> Result<Self> {
        let ellhat = empirical_ell(processes, window)?;
        let (fhat, omega_flags) = empirical_f(errors, window)?;
        Ok(Self {
            ellhat,
            fhat,
            omega_flags,
            n: processes.len(),
            m: errors.len(),
        })
    }

    pub fn from_dataset(ds: &Dataset, window: usize) -> Result<Self> {
        Self::new(&ds.processes, &ds.errors, window)
    }

    pub fn window(&self) -> usize {
        self.ellhat.max_index()
    }

    pub fn flag(&self, j: i64) -> bool {
        self.omega_flags
            .get(j.unsigned_abs() as usize)
            .copied()
            .unwrap_or(false)
    }

    /// `ℓ̂₀`, the average point count.
    pub fn ellhat0(&self) -> f64 {
        self.ellhat.coeff(0).re
    }
}

/// `λ̂_k = Σ_{|j|<=k} ℓ̂_j / f̂_j · 1{Ω_j} e_j`.
pub fn series_estimator(emp: &EmpiricalCoeffs, k: usize) -> Result<FourierVector> {
    if k > emp.window() {
        return Err(Error::OutOfWindow {
            requested: k,
            window: emp.window(),
        });
    }
    let nonneg: Vec<Complex64> = (0..=k as i64)
        .map(|j| {
            if emp.flag(j) {
                emp.ellhat.coeff(j) / emp.fhat.coeff(j)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(FourierVector::hermitian(&nonneg))
}

/// Weighted loss `‖est - λ‖²_ω` split by where it comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskValue {
    /// Sum of the three parts below.
    pub total: f64,
    /// `Σ_{|j|<=K_est} ω_j |est_j - [λ]_j|²`.
    pub window: f64,
    /// `Σ_{K_est<|j|<=tail_K} ω_j |[λ]_j|²`.
    pub gap: f64,
    /// Certified bound on `Σ_{|j|>tail_K} ω_j |[λ]_j|²`.
    pub tail_bound: f64,
}

pub fn exact_risk(
    est: &FourierVector,
    truth: &FunctionSpec,
    omega: &WeightSequence,
    tail_k: usize,
) -> Result<RiskValue> {
    let k = est.max_index();
    if tail_k < k {
        return Err(Error::InvalidParameter(format!(
            "tail window {tail_k} is smaller than the estimator window {k}"
        )));
    }
    let window: f64 = est
        .iter()
        .map(|(j, c)| omega.eval(j) * (c - Complex64::new(truth.coeff(j), 0.0)).norm_sqr())
        .sum();
    let gap: f64 = (k + 1..=tail_k)
        .map(|j| 2.0 * omega.eval(j as i64) * truth.coeff(j as i64).powi(2))
        .sum();
    let tail_bound = truth.weighted_tail_sq(omega, tail_k)?;
    Ok(RiskValue {
        total: window + gap + tail_bound,
        window,
        gap,
        tail_bound,
    })
}

/// JSON sidecar written next to an estimator CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSidecar {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub flags: Vec<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_family, FamilySpec, Role};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pattern(points: &[f64]) -> PointPattern {
        PointPattern::new(points.to_vec()).unwrap()
    }

    #[test]
    fn single_point_coefficients() {
        let ell = empirical_ell(&[pattern(&[0.25])], 2).unwrap();
        assert_eq!(ell.coeff(0), c(1.0, 0.0));
        assert!((ell.coeff(1) - c(0.0, -1.0)).norm() < 1e-15);
        assert!((ell.coeff(-1) - c(0.0, 1.0)).norm() < 1e-15);
        let ell = empirical_ell(&[pattern(&[]), pattern(&[0.5])], 1).unwrap();
        assert_eq!(ell.coeff(0), c(0.5, 0.0));
        assert!((ell.coeff(1) - c(-0.5, 0.0)).norm() < 1e-15);
        let empty = empirical_ell(&[pattern(&[])], 3).unwrap();
        assert!(empty.iter().all(|(_, z)| z.norm() == 0.0));
        assert!(empirical_ell(&[], 3).is_err());
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let pts = [0.013, 0.377, 0.5, 0.999];
        let ell = empirical_ell(&[pattern(&pts)], 300).unwrap();
        for j in [1i64, 63, 64, 65, 199, 300] {
            let direct: Complex64 = pts
                .iter()
                .map(|y| crate::circular::eval_basis(-j, *y))
                .sum();
            assert!((ell.coeff(j) - direct).norm() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn threshold_flags() {
        let (f, flags) = empirical_f(&[0.0; 5], 3).unwrap();
        assert!(f.iter().all(|(_, z)| (z - c(1.0, 0.0)).norm() < 1e-15));
        assert!(flags.iter().all(|b| *b));

        // |f̂_1|² = 1 = 1/m: inclusive boundary
        let (f, flags) = empirical_f(&[0.25], 1).unwrap();
        assert!((f.coeff(1) - c(0.0, -1.0)).norm() < 1e-15);
        assert!(flags[0] && flags[1]);

        let (f, flags) = empirical_f(&[0.0, 0.25, 0.5, 0.75], 2).unwrap();
        assert!(f.coeff(1).norm() < 1e-15);
        assert!(!flags[1]);
        assert!(flags[0]);

        assert!(matches!(empirical_f(&[], 2), Err(Error::EmptySample)));
    }

    #[test]
    fn estimator_cases() {
        let emp = EmpiricalCoeffs::new(&[pattern(&[0.25, 0.6])], &[0.0; 3], 3).unwrap();
        let est = series_estimator(&emp, 0).unwrap();
        assert_eq!(est.max_index(), 0);
        assert_eq!(est.coeff(0), c(2.0, 0.0));

        let emp = EmpiricalCoeffs::new(&[pattern(&[0.25])], &[0.0], 2).unwrap();
        let est = series_estimator(&emp, 1).unwrap();
        assert!((est.coeff(1) - c(0.0, -1.0)).norm() < 1e-15);
        assert!(est.is_real());

        let emp = EmpiricalCoeffs::new(&[pattern(&[0.1, 0.2])], &[0.0, 0.25, 0.5, 0.75], 2).unwrap();
        let est = series_estimator(&emp, 1).unwrap();
        assert_eq!(est.coeff(1), c(0.0, 0.0));
        assert_eq!(est.coeff(-1), c(0.0, 0.0));
        assert!(matches!(
            series_estimator(&emp, 3),
            Err(Error::OutOfWindow { requested: 3, window: 2 })
        ));
    }

    #[test]
    fn risk_examples() {
        let truth = make_family(Role::Intensity, &FamilySpec::Cosine { tau: Some(2.0), beta: 0.5 }).unwrap();
        let exact = truth.coefficients(3);
        let r = exact_risk(&exact, &truth, &WeightSequence::Flat, 10).unwrap();
        assert_eq!(r.total, 0.0);

        let est = FourierVector::hermitian(&[c(2.0, 0.0)]);
        let r = exact_risk(&est, &truth, &WeightSequence::Flat, 10).unwrap();
        assert!((r.total - 0.5).abs() < 1e-15);

        let pk = make_family(
            Role::Intensity,
            &FamilySpec::PoissonKernel { rate: None, decay: Some(0.5), tau: Some(1.0) },
        )
        .unwrap();
        let zero = FourierVector::zeros(0, true);
        for tail_k in [0, 3, 40] {
            let r = exact_risk(&zero, &pk, &WeightSequence::Flat, tail_k).unwrap();
            assert!((r.total - 5.0 / 3.0).abs() < 1e-12, "tail_k={tail_k}");
        }
        assert!(exact_risk(&exact, &truth, &WeightSequence::Flat, 2).is_err());
        let table = WeightSequence::table(vec![1.0]).unwrap();
        assert!(matches!(exact_risk(&zero, &pk, &table, 5), Err(Error::Undecidable(_))));
    }
}
