//! Intensity and error-density families with exact Fourier coefficients, the
//! smoothness classes they are measured against, and checks of the standing
//! assumptions on the weight sequences.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circular::{quadrature_coefficients, FourierVector, WeightSequence};
use crate::error::{Error, Result};

/// Number of equispaced points on which nonnegativity is certified.
pub const CHECK_GRID: usize = 4096;

/// Grid values below this are treated as genuinely negative.
pub const NEGATIVITY_TOL: f64 = 1e-10;

/// Default frequency truncation of the `young_pol` family.
pub const DEFAULT_YOUNG_TRUNCATION: usize = 64;

/// Default total mass of an intensity when the config leaves it out.
pub const DEFAULT_TAU: f64 = 50.0;

/// Wraps a real number onto `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    // rem_euclid of a tiny negative number rounds up to exactly 1.0
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Intensity,
    ErrorDensity,
}

/// Configuration grammar for a family, e.g.
/// `{"family":"cosine","tau":50,"beta":0.5}` or `{"family":"poisson_kernel","rate":0.7}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Uniform {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
    },
    Cosine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        beta: f64,
    },
    PoissonKernel {
        /// `a` in `r = exp(-a)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rate: Option<f64>,
        /// `r` directly.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decay: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
    },
    YoungPol {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        q: f64,
        #[serde(rename = "J", default = "default_truncation")]
        truncation: usize,
    },
}

fn default_truncation() -> usize {
    DEFAULT_YOUNG_TRUNCATION
}

/// Validated shape of a family, normalised so that the coefficient at 0 is 1.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Uniform,
    /// `1 + β cos(2πt)`.
    Cosine { beta: f64 },
    /// `(1 - r²) / (1 - 2r cos(2πt) + r²)`, coefficients `r^{|j|}`.
    PoissonKernel { decay: f64 },
    /// Coefficients `(1 + |j|)^{-q}` for `1 <= |j| <= J`.
    YoungPol { q: f64, coeffs: Vec<f64> },
}

impl Family {
    /// Largest index with a nonzero coefficient, `None` when unbounded.
    pub fn bandwidth(&self) -> Option<usize> {
        match self {
            Family::Uniform => Some(0),
            Family::Cosine { beta } => Some(usize::from(*beta != 0.0)),
            Family::PoissonKernel { .. } => None,
            Family::YoungPol { coeffs, .. } => Some(coeffs.len() - 1),
        }
    }

    fn shape_coeff(&self, j: i64) -> f64 {
        let a = j.unsigned_abs() as usize;
        match self {
            Family::Uniform => f64::from(u8::from(a == 0)),
            Family::Cosine { beta } => match a {
                0 => 1.0,
                1 => beta / 2.0,
                _ => 0.0,
            },
            Family::PoissonKernel { decay } => decay.powi(a as i32),
            Family::YoungPol { coeffs, .. } => coeffs.get(a).copied().unwrap_or(0.0),
        }
    }

    fn shape_value(&self, t: f64) -> f64 {
        match self {
            Family::Uniform => 1.0,
            Family::Cosine { beta } => 1.0 + beta * (TAU * t).cos(),
            Family::PoissonKernel { decay: r } => {
                (1.0 - r * r) / (1.0 - 2.0 * r * (TAU * t).cos() + r * r)
            }
            Family::YoungPol { coeffs, .. } => {
                // Clenshaw recurrence for 1 + 2 Σ c_j cos(2πjt)
                let x = (TAU * t).cos();
                let (mut b1, mut b2) = (0.0, 0.0);
                for &c in coeffs.iter().skip(1).rev() {
                    let b0 = 2.0 * c + 2.0 * x * b1 - b2;
                    b2 = b1;
                    b1 = b0;
                }
                1.0 + b1 * x - b2
            }
        }
    }

    /// `Σ_j |c_j|`, an upper bound for the supremum of the shape.
    fn abs_coeff_sum(&self) -> f64 {
        match self {
            Family::Uniform => 1.0,
            Family::Cosine { beta } => 1.0 + beta.abs(),
            Family::PoissonKernel { decay: r } => (1.0 + r) / (1.0 - r),
            Family::YoungPol { coeffs, .. } => 1.0 + 2.0 * coeffs.iter().skip(1).sum::<f64>(),
        }
    }

    /// `Σ_j 2π|j||c_j|`, a Lipschitz constant of the shape.
    fn lipschitz(&self) -> f64 {
        match self {
            Family::Uniform => 0.0,
            Family::Cosine { beta } => TAU * beta.abs(),
            Family::PoissonKernel { decay: r } => 2.0 * TAU * r / ((1.0 - r) * (1.0 - r)),
            Family::YoungPol { coeffs, .. } => {
                2.0 * TAU
                    * coeffs
                        .iter()
                        .enumerate()
                        .map(|(j, c)| j as f64 * c)
                        .sum::<f64>()
            }
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Cosine { .. } => "cosine",
            Family::PoissonKernel { .. } => "poisson_kernel",
            Family::YoungPol { .. } => "young_pol",
        }
    }
}

/// An intensity (`role = Intensity`, total mass `tau`) or an error density
/// (`tau = 1`) with exact coefficients and certified pointwise bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    role: Role,
    family: Family,
    tau: f64,
    sup_bound: f64,
    inf_bound: f64,
    grid_min: f64,
}

/// Validates `params` for `role` and returns the constructed function.
pub fn make_family(role: Role, params: &FamilySpec) -> Result<FunctionSpec> {
    let tau_of = |tau: &Option<f64>| -> Result<f64> {
        match (role, tau) {
            (Role::Intensity, None) => Ok(DEFAULT_TAU),
            (Role::Intensity, Some(t)) if t.is_finite() && *t > 0.0 => Ok(*t),
            (Role::Intensity, Some(t)) => Err(Error::InvalidParameter(format!(
                "total mass tau must be positive, got {t}"
            ))),
            (Role::ErrorDensity, None) => Ok(1.0),
            (Role::ErrorDensity, Some(t)) if *t == 1.0 => Ok(1.0),
            (Role::ErrorDensity, Some(t)) => Err(Error::InvalidParameter(format!(
                "an error density has unit mass, got tau = {t}"
            ))),
        }
    };
    let (family, tau) = match params {
        FamilySpec::Uniform { tau } => (Family::Uniform, tau_of(tau)?),
        FamilySpec::Cosine { tau, beta } => {
            if !(beta.abs() < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "cosine family needs |beta| < 1, got {beta}"
                )));
            }
            (Family::Cosine { beta: *beta }, tau_of(tau)?)
        }
        FamilySpec::PoissonKernel { rate, decay, tau } => {
            let r = match (rate, decay) {
                (Some(a), None) if a.is_finite() && *a > 0.0 => (-a).exp(),
                (None, Some(r)) if *r > 0.0 && *r < 1.0 => *r,
                (Some(a), None) => {
                    return Err(Error::InvalidParameter(format!(
                        "poisson_kernel rate must be positive, got {a}"
                    )))
                }
                (None, Some(r)) => {
                    return Err(Error::InvalidParameter(format!(
                        "poisson_kernel decay must lie in (0, 1), got {r}"
                    )))
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "poisson_kernel needs exactly one of rate or decay".into(),
                    ))
                }
            };
            (Family::PoissonKernel { decay: r }, tau_of(tau)?)
        }
        FamilySpec::YoungPol { tau, q, truncation } => {
            if !(*q > 1.0 && q.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "young_pol needs q > 1, got {q}"
                )));
            }
            if *truncation < 1 {
                return Err(Error::InvalidParameter(
                    "young_pol needs truncation J >= 1".into(),
                ));
            }
            let coeffs = (0..=*truncation)
                .map(|j| if j == 0 { 1.0 } else { (1.0 + j as f64).powf(-q) })
                .collect();
            (Family::YoungPol { q: *q, coeffs }, tau_of(tau)?)
        }
    };
    FunctionSpec::certify(role, family, tau)
}

impl FunctionSpec {
    fn certify(role: Role, family: Family, tau: f64) -> Result<Self> {
        let (mut grid_min, mut at) = (f64::INFINITY, 0.0);
        for i in 0..CHECK_GRID {
            let t = i as f64 / CHECK_GRID as f64;
            let v = family.shape_value(t);
            if v < grid_min {
                grid_min = v;
                at = t;
            }
        }
        if grid_min < -NEGATIVITY_TOL {
            return Err(Error::Negative {
                value: tau * grid_min,
                at,
            });
        }
        let (sup, inf) = match &family {
            Family::Uniform => (1.0, 1.0),
            Family::Cosine { beta } => (1.0 + beta.abs(), 1.0 - beta.abs()),
            Family::PoissonKernel { decay: r } => ((1.0 + r) / (1.0 - r), (1.0 - r) / (1.0 + r)),
            // positive coefficients peak at t = 0; the minimum is certified
            // from the grid and the Lipschitz slack over half a grid step
            Family::YoungPol { .. } => (
                family.abs_coeff_sum(),
                grid_min - family.lipschitz() / (2.0 * CHECK_GRID as f64),
            ),
        };
        Ok(Self {
            role,
            family,
            tau,
            sup_bound: tau * sup,
            inf_bound: tau * inf,
            grid_min: tau * grid_min,
        })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    /// Total mass, equal to the coefficient at 0.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// Certified lower bound; negative when the grid certificate is inconclusive.
    pub fn inf_bound(&self) -> f64 {
        self.inf_bound
    }

    pub fn grid_min(&self) -> f64 {
        self.grid_min
    }

    pub fn bandwidth(&self) -> Option<usize> {
        self.family.bandwidth()
    }

    /// Exact Fourier coefficient (all families are real and even).
    pub fn coeff(&self, j: i64) -> f64 {
        self.tau * self.family.shape_coeff(j)
    }

    pub fn coefficients(&self, max_index: usize) -> FourierVector {
        FourierVector::from_fn(max_index, true, |j| Complex64::new(self.coeff(j), 0.0))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.tau * self.family.shape_value(t)
    }

    /// Numerical coefficients by equispaced quadrature, independent of
    /// [`FunctionSpec::coeff`].
    pub fn quadrature_coefficients(&self, max_index: usize, nodes: usize) -> Result<FourierVector> {
        quadrature_coefficients(|t| self.eval(t), max_index, nodes)
    }

    /// Upper bound on `Σ_{|j|>k} w(j) |c_j|²`.
    ///
    /// Zero past the bandwidth, a ratio-test geometric bound for the Poisson
    /// kernel, `+∞` when the weighted series diverges.
    pub fn weighted_tail_sq(&self, w: &WeightSequence, k: usize) -> Result<f64> {
        if let Some(b) = self.bandwidth() {
            if k >= b {
                return Ok(0.0);
            }
            let tail: f64 = (k + 1..=b)
                .map(|j| 2.0 * w.eval(j as i64) * self.coeff(j as i64).powi(2))
                .sum();
            return Ok(tail);
        }
        let Family::PoissonKernel { decay: r } = self.family else {
            unreachable!("only the Poisson kernel has unbounded support")
        };
        let scale = 2.0 * self.tau * self.tau;
        match w {
            WeightSequence::Table { .. } => Err(Error::Undecidable(format!(
                "tail of {w} against an infinitely supported family"
            ))),
            WeightSequence::Exp { rate } => {
                let q = rate.exp() * r * r;
                if q >= 1.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok(scale * q.powi(k as i32 + 1) / (1.0 - q))
                }
            }
            WeightSequence::Flat | WeightSequence::Pol { .. } => {
                let power = match w {
                    WeightSequence::Pol { power } => *power,
                    _ => 0.0,
                };
                let term = |j: usize| (j as f64).powf(power) * r.powi(2 * j as i32);
                // successive ratios ((j+1)/j)^p r² decrease in j; sum terms
                // explicitly until the ratio drops below one
                let mut j = k + 1;
                let mut partial = 0.0;
                loop {
                    let ratio = ((j as f64 + 1.0) / j as f64).powf(power.max(0.0)) * r * r;
                    if ratio < 1.0 {
                        return Ok(scale * (partial + term(j) / (1.0 - ratio)));
                    }
                    partial += term(j);
                    j += 1;
                    if j > k + 10_000_000 {
                        return Err(Error::Undecidable("tail ratio test did not settle".into()));
                    }
                }
            }
        }
    }

    /// One draw from the normalised density `self / tau`.
    pub fn sample_location<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.family {
            Family::Uniform => rng.random::<f64>(),
            Family::PoissonKernel { decay } => {
                // wrapped Cauchy: scale a/(2π) on the unit circle, r = exp(-a)
                let scale = -decay.ln() / TAU;
                let u: f64 = rng.random();
                wrap_unit(scale * (PI * (u - 0.5)).tan())
            }
            _ => {
                let envelope = self.sup_bound / self.tau;
                loop {
                    let t: f64 = rng.random();
                    let u: f64 = rng.random();
                    if u * envelope <= self.family.shape_value(t) {
                        return t;
                    }
                }
            }
        }
    }
}

/// Sobolev-type ellipsoid `{λ >= 0 : Σ γ_j |[λ]_j|² <= r}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityClass {
    pub gamma: WeightSequence,
    pub r: f64,
}

impl IntensityClass {
    pub fn new(gamma: WeightSequence, r: f64) -> Result<Self> {
        gamma.validate()?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius r must be positive, got {r}")));
        }
        let below_one = match &gamma {
            WeightSequence::Flat => false,
            WeightSequence::Pol { power } | WeightSequence::Exp { rate: power } => *power < 0.0,
            WeightSequence::Table { values } => values.iter().any(|v| *v < 1.0),
        };
        if below_one {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} drops below 1")));
        }
        Ok(Self { gamma, r })
    }
}

/// Value of `ρ = Σ_j α_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rho {
    Exact { value: f64 },
    /// Partial sum over `|j| <= J` plus an integral bound on the rest.
    Bounded { partial: f64, tail: f64 },
    Infinite,
    Undecidable { partial: f64 },
}

impl Rho {
    pub fn upper(&self) -> Option<f64> {
        match self {
            Rho::Exact { value } => Some(*value),
            Rho::Bounded { partial, tail } => Some(partial + tail),
            _ => None,
        }
    }

    fn of(alpha: &WeightSequence, window: usize) -> Self {
        let partial = 1.0 + 2.0 * (1..=window as i64).map(|j| alpha.eval(j)).sum::<f64>();
        match alpha {
            WeightSequence::Flat => Rho::Infinite,
            WeightSequence::Exp { rate } if *rate < 0.0 => {
                let q = rate.exp();
                Rho::Exact {
                    value: (1.0 + q) / (1.0 - q),
                }
            }
            WeightSequence::Exp { .. } => Rho::Infinite,
            // Σ_{j>J} j^p <= ∫_J^∞ x^p dx = J^{p+1} / (-(p+1))
            WeightSequence::Pol { power } if *power < -1.0 => Rho::Bounded {
                partial,
                tail: 2.0 * (window as f64).powf(power + 1.0) / -(power + 1.0),
            },
            WeightSequence::Pol { .. } => Rho::Infinite,
            WeightSequence::Table { .. } => Rho::Undecidable { partial },
        }
    }
}

/// Error densities with `d^{-1} <= |[f]_j|² / α_j <= d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorClass {
    pub alpha: WeightSequence,
    pub d: f64,
    pub rho: Rho,
}

impl ErrorClass {
    pub fn new(alpha: WeightSequence, d: f64) -> Result<Self> {
        alpha.validate()?;
        if !(d >= 1.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")));
        }
        if alpha.is_nonincreasing() == Some(false) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} is not nonincreasing")));
        }
        let rho = Rho::of(&alpha, 1000);
        if rho == Rho::Infinite {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} is not summable")));
        }
        Ok(Self { alpha, d, rho })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntensityMembership {
    /// `Σ γ_j |[λ]_j|²` including the certified tail.
    pub weighted_norm_sq: f64,
    pub tail_bound: f64,
    pub r: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorMembership {
    /// Extremes of `|[f]_j|² / α_j` over the inspected indices.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Indices `0..=inspected` were examined explicitly.
    pub inspected: usize,
    /// The bounds hold on the support `|j| <= bandwidth` (all `j` if unbounded).
    pub holds_on_support: bool,
    pub holds: bool,
    /// Smallest `j >= 0` at which a bound fails.
    pub first_failure: Option<usize>,
}

pub fn intensity_membership(spec: &FunctionSpec, cls: &IntensityClass) -> Result<IntensityMembership> {
    let window = spec.bandwidth().unwrap_or(256);
    let head: f64 = (-(window as i64)..=window as i64)
        .map(|j| cls.gamma.eval(j) * spec.coeff(j).powi(2))
        .sum();
    let tail = spec.weighted_tail_sq(&cls.gamma, window)?;
    let total = head + tail;
    Ok(IntensityMembership {
        weighted_norm_sq: total,
        tail_bound: tail,
        r: cls.r,
        holds: spec.role() == Role::Intensity && total <= cls.r,
    })
}

pub fn error_membership(spec: &FunctionSpec, cls: &ErrorClass) -> Result<ErrorMembership> {
    if spec.role() != Role::ErrorDensity {
        return Err(Error::InvalidParameter(
            "error-class membership needs an error density".into(),
        ));
    }
    let d = cls.d;
    let ratio = |j: usize| spec.coeff(j as i64).powi(2) / cls.alpha.eval(j as i64);
    let within = |x: f64| x >= 1.0 / d && x <= d;
    let scan = |limit: usize| {
        let (mut lo, mut hi, mut fail) = (f64::INFINITY, f64::NEG_INFINITY, None);
        for j in 0..=limit {
            let x = ratio(j);
            lo = lo.min(x);
            hi = hi.max(x);
            if fail.is_none() && !within(x) {
                fail = Some(j);
                break;
            }
        }
        (lo, hi, fail)
    };
    match (spec.family(), &cls.alpha) {
        (fam, _) if fam.bandwidth().is_some() => {
            let b = fam.bandwidth().unwrap_or(0);
            let (lo, hi, fail) = scan(b);
            // the coefficient at b + 1 vanishes, so the lower bound fails there
            Ok(ErrorMembership {
                min_ratio: lo.min(0.0),
                max_ratio: hi,
                inspected: b + 1,
                holds_on_support: fail.is_none(),
                holds: false,
                first_failure: fail.or(Some(b + 1)),
            })
        }
        (_, WeightSequence::Table { .. }) => Err(Error::Undecidable(format!(
            "{} against a tabulated alpha",
            spec.name()
        ))),
        (Family::PoissonKernel { decay: r }, WeightSequence::Exp { rate }) => {
            let slope = 2.0 * r.ln() - rate;
            if slope.abs() <= 1e-12 * rate.abs().max(1.0) {
                return Ok(ErrorMembership {
                    min_ratio: 1.0,
                    max_ratio: 1.0,
                    inspected: 0,
                    holds_on_support: true,
                    holds: true,
                    first_failure: None,
                });
            }
            // log ratio is slope·j; it leaves [-ln d, ln d] after ln d / |slope|
            let limit = (d.ln() / slope.abs()).floor() as usize + 1;
            let (lo, hi, fail) = scan(limit);
            Ok(ErrorMembership {
                min_ratio: if slope < 0.0 { 0.0 } else { lo },
                max_ratio: if slope > 0.0 { f64::INFINITY } else { hi },
                inspected: limit,
                holds_on_support: false,
                holds: false,
                first_failure: fail,
            })
        }
        (Family::PoissonKernel { .. }, _) => {
            // geometric decay beats any polynomial, so the ratio tends to 0
            let limit = 10_000_000;
            let (lo, hi, fail) = scan(limit);
            let Some(j) = fail else {
                return Err(Error::Undecidable("ratio stayed in range over the scan".into()));
            };
            Ok(ErrorMembership {
                min_ratio: lo.min(0.0),
                max_ratio: hi,
                inspected: j,
                holds_on_support: false,
                holds: false,
                first_failure: Some(j),
            })
        }
        _ => unreachable!("band-limited families handled above"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NotOneAtZero { sequence: &'static str, value: f64 },
    NotPositive { sequence: &'static str, index: usize },
    GammaBelowOne { index: usize },
    OmegaOverGammaIncreasing { index: usize },
    AlphaIncreasing { index: usize },
    RhoInfinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub violations: Vec<Violation>,
    pub rho: Rho,
    pub window: usize,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.rho.upper().is_some()
    }
}

/// Checks the standing assumptions on `(ω, γ, α)` over `0..=window`.
pub fn check_assumption_seq(
    omega: &WeightSequence,
    gamma: &WeightSequence,
    alpha: &WeightSequence,
    window: usize,
) -> Result<AssumptionReport> {
    if window < 1 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    let mut violations = Vec::new();
    for (name, w) in [("omega", omega), ("gamma", gamma), ("alpha", alpha)] {
        let v0 = w.eval(0);
        if (v0 - 1.0).abs() > 1e-12 {
            violations.push(Violation::NotOneAtZero {
                sequence: name,
                value: v0,
            });
        }
        if let Some(j) = (0..=window).find(|&j| !(w.eval(j as i64) > 0.0)) {
            violations.push(Violation::NotPositive {
                sequence: name,
                index: j,
            });
        }
    }
    if let Some(j) = (1..=window).find(|&j| gamma.eval(j as i64) < 1.0) {
        violations.push(Violation::GammaBelowOne { index: j });
    }
    let ratio = |j: usize| omega.eval(j as i64) / gamma.eval(j as i64);
    if let Some(j) = (1..=window).find(|&j| ratio(j) > ratio(j - 1)) {
        violations.push(Violation::OmegaOverGammaIncreasing { index: j });
    }
    if let Some(j) = (1..=window).find(|&j| alpha.eval(j as i64) > alpha.eval(j as i64 - 1)) {
        violations.push(Violation::AlphaIncreasing { index: j });
    }
    let rho = Rho::of(alpha, window);
    if rho == Rho::Infinite {
        violations.push(Violation::RhoInfinite);
    }
    Ok(AssumptionReport {
        violations,
        rho,
        window,
    })
}
