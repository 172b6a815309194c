//! Deterministic index sequences from the risk analysis of the adaptive
//! rules, and grid checks of the facts they rely on.

use serde::Serialize;

use super::adaptive::{partial_m_index, partial_n_index};
use super::{delta, first_hit_index, running_max, DeltaVariant};
use crate::circular::WeightSequence;
use crate::error::{Error, Result};
use crate::models::FunctionSpec;

/// Bracketing indices `N_n^{α∓}`, `M_m^{α∓}`, `K_nm^{α∓}` and, when the
/// error density is known, `Δ_k`/`δ_k` for `k = 0..=k_plus`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofIndices {
    pub n_minus: usize,
    pub n_plus: usize,
    pub m_minus: usize,
    pub m_plus: usize,
    pub k_minus: usize,
    pub k_plus: usize,
    pub big_delta: Vec<f64>,
    pub delta: Vec<f64>,
}

fn n_index_scaled(omega: &WeightSequence, alpha: &WeightSequence, n: usize, scale: f64) -> usize {
    let nf = n as f64;
    let level = scale * (nf + 4.0).ln() / nf;
    let mut omega_plus = omega.eval(0);
    first_hit_index(n, |j| {
        omega_plus = omega_plus.max(omega.eval(j as i64));
        alpha.eval(j as i64) / ((2 * j + 1) as f64) < level * omega_plus
    })
}

fn m_index_scaled(alpha: &WeightSequence, m: usize, scale: f64) -> usize {
    let mf = m as f64;
    let level = scale * mf.ln() / mf;
    first_hit_index(m, |j| alpha.eval(j as i64) < level)
}

pub fn proof_indices(
    omega: &WeightSequence,
    alpha: &WeightSequence,
    d: f64,
    n: usize,
    m: usize,
    f: Option<&FunctionSpec>,
) -> Result<ProofIndices> {
    if !(d >= 1.0) {
        return Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be positive".into()));
    }
    let n_minus = n_index_scaled(omega, alpha, n, 4.0 * d);
    let n_plus = n_index_scaled(omega, alpha, n, 1.0 / (4.0 * d));
    let m_minus = m_index_scaled(alpha, m, 4.0 * d);
    let m_plus = m_index_scaled(alpha, m, 1.0 / (4.0 * d));
    let k_minus = n_minus.min(m_minus);
    let k_plus = n_plus.min(m_plus);
    let (big_delta, deltas) = match f {
        Some(f) => {
            let bd = running_max((0..=k_plus as i64).map(|j| omega.eval(j) / f.coeff(j).powi(2)));
            let ds = bd
                .iter()
                .enumerate()
                .map(|(k, v)| delta(k, *v, DeltaVariant::Full))
                .collect();
            (bd, ds)
        }
        None => (Vec::new(), Vec::new()),
    };
    Ok(ProofIndices {
        n_minus,
        n_plus,
        m_minus,
        m_plus,
        k_minus,
        k_plus,
        big_delta,
        delta: deltas,
    })
}

/// `K̂_nm` with the empirical `f̂` replaced by the exact coefficients.
pub fn exact_full_cap(omega: &WeightSequence, f: &FunctionSpec, n: usize, m: usize) -> usize {
    let fsq = WeightSequence::table((0..=n.max(m)).map(|j| f.coeff(j as i64).powi(2).max(f64::MIN_POSITIVE)).collect());
    match fsq {
        Ok(table) => n_index_scaled(omega, &table, n, 1.0).min(m_index_scaled(&table, m, 1.0)),
        Err(_) => 0,
    }
}

/// One row of the assumption certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateRow {
    pub m: usize,
    pub m_plus: usize,
    /// `exp(-m α_{M⁺+1} / (128d)) · m⁵`.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub checked: usize,
    pub vacuous: usize,
    /// First parameter value at which the statement failed.
    pub failures: Vec<usize>,
    /// Largest `lhs / rhs` encountered.
    pub worst_ratio: f64,
}

impl LemmaCheck {
    fn new() -> Self {
        Self {
            checked: 0,
            vacuous: 0,
            failures: Vec::new(),
            worst_ratio: 0.0,
        }
    }

    fn record(&mut self, at: usize, lhs: f64, rhs: f64) {
        self.checked += 1;
        self.worst_ratio = self.worst_ratio.max(lhs / rhs);
        if lhs > rhs {
            self.failures.push(at);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Grid report for the extra assumption of the fully adaptive rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullyReport {
    pub rows: Vec<CertificateRow>,
    /// `max_m exp(-m α_{M⁺+1}/(128d)) m⁵` over the grid: the smallest
    /// constant that works on the grid.
    pub certificate: f64,
    /// Least-squares slope of `log scaled` against `log m`; a value near 0
    /// means a constant exists, a positive value means it grows with `m`.
    pub growth_exponent: Option<f64>,
}

pub fn check_assumption_fully(alpha: &WeightSequence, d: f64, m_grid: &[usize]) -> Result<FullyReport> {
    if m_grid.is_empty() {
        return Err(Error::InvalidParameter("empty m grid".into()));
    }
    let rows: Vec<CertificateRow> = m_grid
        .iter()
        .map(|&m| {
            let m_plus = m_index_scaled(alpha, m, 1.0 / (4.0 * d));
            let a = alpha.eval(m_plus as i64 + 1);
            let scaled = (-(m as f64) * a / (128.0 * d)).exp() * (m as f64).powi(5);
            CertificateRow { m, m_plus, scaled }
        })
        .collect();
    let certificate = rows.iter().map(|r| r.scaled).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.scaled > 0.0 && r.m > 1)
        .map(|r| ((r.m as f64).ln(), r.scaled.ln()))
        .collect();
    let growth_exponent = least_squares_slope(&pts);
    Ok(FullyReport {
        rows,
        certificate,
        growth_exponent,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `δ_j^α / n <= 1` for every `j <= N_n^α` (with `log(k+3)`), over `ns`.
pub fn lemma_variance_budget(
    omega: &WeightSequence,
    alpha: &WeightSequence,
    ns: impl IntoIterator<Item = usize>,
) -> LemmaCheck {
    let mut out = LemmaCheck::new();
    for n in ns {
        let cap = partial_n_index(omega, alpha, n);
        let bd = running_max((0..=cap as i64).map(|j| omega.eval(j) / alpha.eval(j)));
        let worst = bd
            .iter()
            .enumerate()
            .map(|(j, v)| delta(j, *v, DeltaVariant::Partial) / n as f64)
            .fold(0.0, f64::max);
        out.record(n, worst, 1.0);
    }
    out
}

/// `exp(-m α_{M_m^α}/(128d)) <= (m+1)^{-5}` whenever `M_m^α >= 1`.
pub fn lemma_threshold_tail(alpha: &WeightSequence, d: f64, ms: impl IntoIterator<Item = usize>) -> LemmaCheck {
    let mut out = LemmaCheck::new();
    for m in ms {
        let cap = partial_m_index(alpha, d, m);
        if cap == 0 {
            out.vacuous += 1;
            continue;
        }
        let lhs = (-(m as f64) * alpha.eval(cap as i64) / (128.0 * d)).exp();
        out.record(m, lhs, (m as f64 + 1.0).powi(-5));
    }
    out
}

/// `min_{1<=j<=M_m^α} |[f]_j|² >= 2/m`.
pub fn lemma_coefficient_floor(
    alpha: &WeightSequence,
    d: f64,
    f: &FunctionSpec,
    ms: impl IntoIterator<Item = usize>,
) -> LemmaCheck {
    let mut out = LemmaCheck::new();
    for m in ms {
        let cap = partial_m_index(alpha, d, m);
        if cap == 0 {
            out.vacuous += 1;
            continue;
        }
        let min = (1..=cap as i64).map(|j| f.coeff(j).powi(2)).fold(f64::INFINITY, f64::min);
        out.record(m, 2.0 / m as f64, min);
    }
    out
}
