//! Dimension choices for the series estimator.
//!
//! [`oracle_rates`] computes the rate functionals and the class-dependent
//! oracle dimension, [`partial_adaptive`] and [`full_adaptive`] are the two
//! penalized-contrast selectors, and [`indices`] holds the deterministic
//! index sequences used to audit them.

mod adaptive;
pub mod indices;
mod rates;

pub use adaptive::{
    contrast, contrast_values, full_adaptive, partial_adaptive, partial_m_index, partial_n_index,
    ConstantsMode, IndexBound, SelectionMode, SelectionResult, FULL_PENALTY, PARTIAL_M_THRESHOLD,
    PARTIAL_PENALTY,
};
pub use indices::{
    check_assumption_fully, exact_full_cap, lemma_coefficient_floor, lemma_threshold_tail,
    lemma_variance_budget, proof_indices, CertificateRow, FullyReport, LemmaCheck, ProofIndices,
};
pub use rates::{
    oracle_dimension, oracle_rates, phi_rate, rate_formula, OracleDimension, RateKind, RatePoint,
    Sample, Scenario,
};

/// Which logarithm shift a `δ` sequence uses: `log(k+3)` for the partially
/// adaptive rule, `log(k+4)` for the fully adaptive one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaVariant {
    Partial,
    Full,
}

impl DeltaVariant {
    fn shift(self) -> f64 {
        match self {
            DeltaVariant::Partial => 3.0,
            DeltaVariant::Full => 4.0,
        }
    }
}

/// `δ_k = (2k+1) Δ_k log(Δ_k ∨ (k+s)) / log(k+s)`.
pub fn delta(k: usize, big_delta: f64, variant: DeltaVariant) -> f64 {
    let base = k as f64 + variant.shift();
    (2 * k + 1) as f64 * big_delta * big_delta.max(base).ln() / base.ln()
}

/// `(inf{1 <= j <= bound : hit(j)} - 1) ∧ bound` with `inf ∅ = bound + 1`.
pub fn first_hit_index(bound: usize, mut hit: impl FnMut(usize) -> bool) -> usize {
    (1..=bound).find(|&j| hit(j)).map_or(bound, |j| j - 1)
}

/// Running maxima `max_{0<=i<=j} values[i]`.
pub(crate) fn running_max(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut best = f64::NEG_INFINITY;
    values
        .into_iter()
        .map(|v| {
            best = best.max(v);
            best
        })
        .collect()
}
