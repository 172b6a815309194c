use serde::{Deserialize, Serialize};

use crate::circular::WeightSequence;
use crate::error::{Error, Result};

/// Oracle dimension and the two terms it balances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleDimension {
    pub k_star: usize,
    /// `max{bias_term, variance_term}` at `k_star`.
    pub psi: f64,
    /// `ω_k/γ_k` at `k_star`.
    pub bias_term: f64,
    /// `Σ_{|j|<=k} ω_j/(nα_j)` at `k_star`.
    pub variance_term: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub k_star: usize,
    pub psi: f64,
    pub phi: f64,
    pub bias_term: f64,
    pub variance_term: f64,
}

/// `k_n* = argmin_k max{ω_k/γ_k, Σ_{|j|<=k} ω_j/(nα_j)}` and `Ψ_n`.
///
/// Scans `k = 0..=k_max` and stops as soon as the variance term alone reaches
/// the best value found, since it only grows while the bias term only shrinks.
/// Ties go to the smallest `k`.
pub fn oracle_dimension(
    omega: &WeightSequence,
    gamma: &WeightSequence,
    alpha: &WeightSequence,
    n: usize,
    k_max: usize,
) -> Result<OracleDimension> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let nf = n as f64;
    let mut best: Option<OracleDimension> = None;
    let mut variance = 0.0;
    let mut prev_bias = f64::INFINITY;
    for k in 0..=k_max {
        let kk = k as i64;
        let term = omega.eval(kk) / (nf * alpha.eval(kk));
        variance += if k == 0 { term } else { 2.0 * term };
        if let Some(b) = &best {
            if variance >= b.psi {
                return Ok(*b);
            }
        }
        let bias = omega.eval(kk) / gamma.eval(kk);
        if bias > prev_bias {
            return Err(Error::InvalidParameter(format!(
                "omega/gamma increases at k = {k}; the bias term must be nonincreasing"
            )));
        }
        prev_bias = bias;
        let value = bias.max(variance);
        if best.is_none_or(|b| value < b.psi) {
            best = Some(OracleDimension {
                k_star: k,
                psi: value,
                bias_term: bias,
                variance_term: variance,
            });
        }
    }
    Err(Error::WindowTooSmall(format!(
        "oracle scan reached k_max = {k_max} before the variance term dominated"
    )))
}

/// `Φ_m = max_{k>=1} ω_k/γ_k · min(1, 1/(mα_k))`.
///
/// Stops once `ω_k/γ_k` drops to the running maximum.
pub fn phi_rate(
    omega: &WeightSequence,
    gamma: &WeightSequence,
    alpha: &WeightSequence,
    m: usize,
    k_max: usize,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    let mf = m as f64;
    let mut best = 0.0f64;
    for k in 1..=k_max as i64 {
        let ratio = omega.eval(k) / gamma.eval(k);
        if k > 1 && ratio <= best {
            return Ok(best);
        }
        best = best.max(ratio * (1.0 / (mf * alpha.eval(k))).min(1.0));
    }
    Err(Error::WindowTooSmall(format!(
        "phi scan reached k_max = {k_max} before omega/gamma fell below the maximum"
    )))
}

/// Both rate functionals and the oracle dimension.
///
/// `k_star` depends only on `(ω, γ, α, n)`; `m` enters through `phi` alone.
pub fn oracle_rates(
    omega: &WeightSequence,
    gamma: &WeightSequence,
    alpha: &WeightSequence,
    n: usize,
    m: usize,
    k_max: usize,
) -> Result<RatePoint> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    for w in [omega, gamma, alpha] {
        w.validate()?;
    }
    let oracle = oracle_dimension(omega, gamma, alpha, n, k_max)?;
    let phi = phi_rate(omega, gamma, alpha, m, k_max)?;
    Ok(RatePoint {
        k_star: oracle.k_star,
        psi: oracle.psi,
        phi,
        bias_term: oracle.bias_term,
        variance_term: oracle.variance_term,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    Pol,
    Exp,
}

/// Decay regimes of `(γ, α)`, with `ω_j = |j|^{2s}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub gamma: RateKind,
    pub alpha: RateKind,
}

impl Scenario {
    /// Weight sequences realising the scenario.
    pub fn weights(&self, s: f64, p: f64, a: f64) -> (WeightSequence, WeightSequence, WeightSequence) {
        let omega = if s == 0.0 {
            WeightSequence::Flat
        } else {
            WeightSequence::pol_growth(s)
        };
        let gamma = match self.gamma {
            RateKind::Pol => WeightSequence::pol_growth(p),
            RateKind::Exp => WeightSequence::exp_growth(p),
        };
        let alpha = match self.alpha {
            RateKind::Pol => WeightSequence::pol_decay(a),
            RateKind::Exp => WeightSequence::exp_decay(a),
        };
        (omega, gamma, alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sample {
    /// Number of observed processes, rate `Ψ_n`.
    Processes,
    /// Size of the error sample, rate `Φ_m`.
    Errors,
}

/// Closed-form order of `Ψ_n` or `Φ_m` (constants dropped).
pub fn rate_formula(scenario: Scenario, s: f64, p: f64, a: f64, size: f64, sample: Sample) -> Result<f64> {
    if !(s >= 0.0 && p >= 0.0 && a >= 0.0) {
        return Err(Error::Restriction("s, p and a must be nonnegative".into()));
    }
    if !(size >= 1.0) {
        return Err(Error::Restriction(format!("sample size {size} must be at least 1")));
    }
    use RateKind::{Exp, Pol};
    let ln = size.ln();
    match (scenario.gamma, scenario.alpha) {
        (Pol, Pol) => {
            if p < s {
                return Err(Error::Restriction("(pol, pol) needs p >= s".into()));
            }
            if a <= 0.5 {
                return Err(Error::Restriction("(pol, pol) needs a > 1/2".into()));
            }
            Ok(match sample {
                Sample::Processes => size.powf(-2.0 * (p - s) / (2.0 * p + 2.0 * a + 1.0)),
                Sample::Errors => size.powf(-(p - s).min(a) / a),
            })
        }
        (Exp, Pol) => {
            if a <= 0.5 {
                return Err(Error::Restriction("(exp, pol) needs a > 1/2".into()));
            }
            Ok(match sample {
                Sample::Processes => ln.powf(2.0 * s + 2.0 * a + 1.0) / size,
                Sample::Errors => 1.0 / size,
            })
        }
        (Pol, Exp) => {
            if p < s {
                return Err(Error::Restriction("(pol, exp) needs p >= s".into()));
            }
            Ok(ln.powf(-2.0 * (p - s)))
        }
        (Exp, Exp) => {
            if p + a <= 0.0 {
                return Err(Error::Restriction("(exp, exp) needs p + a > 0".into()));
            }
            Ok(match sample {
                Sample::Processes => ln.powf(2.0 * s) * size.powf(-p / (p + a)),
                Sample::Errors if a >= p => ln.powf(2.0 * s) * size.powf(-p / a),
                Sample::Errors => 1.0 / size,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol_pol() -> (WeightSequence, WeightSequence, WeightSequence) {
        Scenario { gamma: RateKind::Pol, alpha: RateKind::Pol }.weights(0.0, 1.0, 1.0)
    }

    /// Exhaustive minimisation over `0..=limit` without early stopping.
    fn brute_psi(o: &WeightSequence, g: &WeightSequence, a: &WeightSequence, n: usize, limit: i64) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for k in 0..=limit {
            let var: f64 = (-k..=k).map(|j| o.eval(j) / (n as f64 * a.eval(j))).sum();
            let v = (o.eval(k) / g.eval(k)).max(var);
            if v < best.1 {
                best = (k as usize, v);
            }
        }
        best
    }

    #[test]
    fn psi_example() {
        let (o, g, a) = pol_pol();
        let r = oracle_dimension(&o, &g, &a, 100, 50).unwrap();
        assert_eq!(r.k_star, 2);
        assert!((r.psi - 0.25).abs() < 1e-15);
        assert!((r.variance_term - 0.11).abs() < 1e-15);
        assert_eq!(brute_psi(&o, &g, &a, 100, 50), (2, r.psi));
        for n in [1, 7, 100, 1234, 100_000] {
            let r = oracle_dimension(&o, &g, &a, n, 500).unwrap();
            let (k, v) = brute_psi(&o, &g, &a, n, 200);
            assert_eq!((r.k_star, r.psi), (k, v), "n={n}");
        }
    }

    #[test]
    fn phi_example() {
        let (o, g, a) = pol_pol();
        let phi = phi_rate(&o, &g, &a, 100, 1000).unwrap();
        assert!((phi - 0.01).abs() < 1e-18);
        let brute = (1..=1000)
            .map(|k| o.eval(k) / g.eval(k) * (1.0 / (100.0 * a.eval(k))).min(1.0))
            .fold(0.0, f64::max);
        assert_eq!(phi, brute);
    }

    #[test]
    fn degenerate_zero_model() {
        let w = WeightSequence::pol_growth(1.0);
        let r = oracle_dimension(&w, &w, &WeightSequence::pol_decay(1.0), 1, 10).unwrap();
        assert_eq!(r.k_star, 0);
        assert_eq!(r.psi, 1.0);
    }

    #[test]
    fn k_star_ignores_m() {
        let (o, g, a) = pol_pol();
        let ks: Vec<usize> = [1, 10, 1000, 100_000]
            .iter()
            .map(|&m| oracle_rates(&o, &g, &a, 500, m, 10_000).unwrap().k_star)
            .collect();
        assert!(ks.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn window_too_small_is_reported() {
        let (o, g, a) = pol_pol();
        assert!(matches!(
            oracle_dimension(&o, &g, &a, 10_000_000, 3),
            Err(Error::WindowTooSmall(_))
        ));
        assert!(matches!(phi_rate(&o, &g, &a, 10_000, 5), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn table_entries() {
        let pp = Scenario { gamma: RateKind::Pol, alpha: RateKind::Pol };
        let ep = Scenario { gamma: RateKind::Exp, alpha: RateKind::Pol };
        let v = rate_formula(pp, 0.0, 1.0, 1.0, 1e4, Sample::Processes).unwrap();
        assert!((v / 10f64.powf(-1.6) - 1.0).abs() < 1e-12);
        let v = rate_formula(pp, 0.0, 1.0, 1.0, 1e3, Sample::Errors).unwrap();
        assert!((v / 1e-3 - 1.0).abs() < 1e-12);
        let v = rate_formula(ep, 0.0, 1.0, 1.0, 10f64.exp(), Sample::Processes).unwrap();
        assert!((v / (1e3 * (-10f64).exp()) - 1.0).abs() < 1e-12);
        assert!(matches!(
            rate_formula(pp, 1.0, 0.5, 1.0, 10.0, Sample::Processes),
            Err(Error::Restriction(_))
        ));
        assert!(matches!(
            rate_formula(ep, 0.0, 1.0, 0.5, 10.0, Sample::Errors),
            Err(Error::Restriction(_))
        ));
        let ee = Scenario { gamma: RateKind::Exp, alpha: RateKind::Exp };
        assert_eq!(rate_formula(ee, 0.0, 2.0, 1.0, 100.0, Sample::Errors).unwrap(), 0.01);
        let v = rate_formula(ee, 0.0, 1.0, 2.0, 100.0, Sample::Errors).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
    }
}
