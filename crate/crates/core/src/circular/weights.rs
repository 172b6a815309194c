use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly positive symmetric weight sequence `w(j) = w(-j)`.
///
/// The JSON form is tagged by `kind`:
/// `{"kind":"flat"}`, `{"kind":"pol","power":2}` for `|j|^power`,
/// `{"kind":"exp","rate":-1.4}` for `exp(rate·|j|)` and
/// `{"kind":"table","values":[…]}` listing `w(0), w(1), …`.
/// Polynomial weights take the value 1 at `j = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSequence {
    Flat,
    Pol { power: f64 },
    Exp { rate: f64 },
    /// Values for `|j| = 0, 1, …`; indices past the end repeat the last entry.
    Table { values: Vec<f64> },
}

impl WeightSequence {
    /// `|j|^{2s}`: Sobolev-type weights (ω or γ).
    pub fn pol_growth(s: f64) -> Self {
        Self::Pol { power: 2.0 * s }
    }

    /// `|j|^{-2a}`: ordinary smooth error decay (α).
    pub fn pol_decay(a: f64) -> Self {
        Self::Pol { power: -2.0 * a }
    }

    /// `exp(2p|j|)`: analytic intensity weights (γ).
    pub fn exp_growth(p: f64) -> Self {
        Self::Exp { rate: 2.0 * p }
    }

    /// `exp(-2a|j|)`: supersmooth error decay (α).
    pub fn exp_decay(a: f64) -> Self {
        Self::Exp { rate: -2.0 * a }
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let w = Self::Table { values };
        w.validate()?;
        Ok(w)
    }

    /// Rejects parameters that break finiteness or positivity.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Flat => Ok(()),
            Self::Pol { power } | Self::Exp { rate: power } if !power.is_finite() => Err(
                Error::InvalidParameter(format!("weight parameter {power} is not finite")),
            ),
            Self::Pol { .. } | Self::Exp { .. } => Ok(()),
            Self::Table { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidParameter("empty weight table".into()));
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                    return Err(Error::InvalidParameter(format!(
                        "weight table entry {v} is not strictly positive"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, j: i64) -> f64 {
        let a = j.unsigned_abs();
        match self {
            Self::Flat => 1.0,
            Self::Pol { .. } if a == 0 => 1.0,
            Self::Pol { power } => (a as f64).powf(*power),
            Self::Exp { rate } => (rate * a as f64).exp(),
            Self::Table { values } => values[(a as usize).min(values.len() - 1)],
        }
    }

    /// `[w(0), …, w(k)]`.
    pub fn values_upto(&self, k: usize) -> Vec<f64> {
        (0..=k as i64).map(|j| self.eval(j)).collect()
    }

    /// `w⁺(j) = max_{0≤i≤j} w(i)` for `j = 0..=k`.
    pub fn running_max_upto(&self, k: usize) -> Vec<f64> {
        let mut best = f64::NEG_INFINITY;
        self.values_upto(k)
            .into_iter()
            .map(|v| {
                best = best.max(v);
                best
            })
            .collect()
    }

    /// Closed-form families can be summed to infinity; tables cannot.
    pub fn has_decidable_tail(&self) -> bool {
        !matches!(self, Self::Table { .. })
    }

    /// Nonincreasing in `|j|` for every index.
    pub fn is_nonincreasing(&self) -> Option<bool> {
        match self {
            Self::Flat => Some(true),
            Self::Pol { power } | Self::Exp { rate: power } => Some(*power <= 0.0),
            Self::Table { values } => Some(values.windows(2).all(|w| w[1] <= w[0])),
        }
    }
}

impl std::fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Flat => write!(f, "flat"),
            Self::Pol { power } => write!(f, "pol(|j|^{power})"),
            Self::Exp { rate } => write!(f, "exp({rate}|j|)"),
            Self::Table { values } => write!(f, "table[{}]", values.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_one_at_zero() {
        let seqs = [
            WeightSequence::Flat,
            WeightSequence::pol_growth(1.0),
            WeightSequence::pol_decay(0.7),
            WeightSequence::exp_growth(0.3),
            WeightSequence::exp_decay(0.7),
        ];
        for w in &seqs {
            assert_eq!(w.eval(0), 1.0, "{w}");
            for j in 1..40 {
                assert_eq!(w.eval(j), w.eval(-j));
                assert!(w.eval(j) > 0.0);
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(WeightSequence::pol_growth(1.0).eval(3), 9.0);
        assert_eq!(WeightSequence::pol_decay(1.0).eval(-2), 0.25);
        assert!((WeightSequence::exp_decay(0.7).eval(2) - (-2.8f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn running_max() {
        let w = WeightSequence::table(vec![1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!(w.running_max_upto(5), vec![1.0, 3.0, 3.0, 5.0, 5.0, 5.0]);
        assert_eq!(w.is_nonincreasing(), Some(false));
    }

    #[test]
    fn table_validation() {
        assert!(WeightSequence::table(vec![]).is_err());
        assert!(WeightSequence::table(vec![1.0, 0.0]).is_err());
        assert!(WeightSequence::table(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn json_grammar() {
        let w: WeightSequence = serde_json::from_str(r#"{"kind":"pol","power":-2}"#).unwrap();
        assert_eq!(w, WeightSequence::pol_decay(1.0));
        let w: WeightSequence = serde_json::from_str(r#"{"kind":"flat"}"#).unwrap();
        assert_eq!(w, WeightSequence::Flat);
        let s = serde_json::to_string(&WeightSequence::exp_decay(0.7)).unwrap();
        assert_eq!(s, r#"{"kind":"exp","rate":-1.4}"#);
    }
}
