use std::f64::consts::TAU;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::WeightSequence;
use crate::error::{Error, Result};

/// Relative tolerance on the imaginary part when synthesizing a real function.
pub const REAL_SYNTHESIS_TOL: f64 = 1e-9;

/// Dense window of Fourier coefficients for `j ∈ {-K, …, K}`.
///
/// When `real` is set the window is Hermitian: the coefficient at `-j` is the
/// conjugate of the one at `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierVector {
    max_index: usize,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl FourierVector {
    pub fn zeros(max_index: usize, real: bool) -> Self {
        Self {
            max_index,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * max_index + 1],
            real,
        }
    }

    /// Builds a Hermitian window from the coefficients at `j = 0..=K`.
    ///
    /// The value at `j = 0` is projected onto the real axis.
    pub fn hermitian(nonnegative: &[Complex64]) -> Self {
        assert!(!nonnegative.is_empty(), "need at least the coefficient at 0");
        let max_index = nonnegative.len() - 1;
        let mut v = Self::zeros(max_index, true);
        v.coeffs[max_index] = Complex64::new(nonnegative[0].re, 0.0);
        for (j, c) in nonnegative.iter().enumerate().skip(1) {
            v.coeffs[max_index + j] = *c;
            v.coeffs[max_index - j] = c.conj();
        }
        v
    }

    /// Builds a window from a coefficient rule evaluated at every index.
    pub fn from_fn(max_index: usize, real: bool, mut rule: impl FnMut(i64) -> Complex64) -> Self {
        let k = max_index as i64;
        Self {
            max_index,
            coeffs: (-k..=k).map(&mut rule).collect(),
            real,
        }
    }

    /// Builds a window from coefficients listed for `j = -K..=K`.
    pub fn from_coefficients(coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "a symmetric window needs an odd number of coefficients, got {}",
                coeffs.len()
            )));
        }
        let v = Self {
            max_index: coeffs.len() / 2,
            coeffs,
            real,
        };
        if real && v.hermitian_defect() > 0.0 {
            return Err(Error::InvalidParameter(
                "coefficients flagged real are not Hermitian".into(),
            ));
        }
        Ok(v)
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient at `j`, zero outside the stored window.
    pub fn coeff(&self, j: i64) -> Complex64 {
        if j.unsigned_abs() as usize > self.max_index {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(j + self.max_index as i64) as usize]
        }
    }

    /// Overwrites the coefficient at `j`. Clears the real flag because the
    /// mirror entry is left untouched.
    pub fn set(&mut self, j: i64, value: Complex64) -> Result<()> {
        let a = j.unsigned_abs() as usize;
        if a > self.max_index {
            return Err(Error::OutOfWindow {
                requested: a,
                window: self.max_index,
            });
        }
        self.coeffs[(j + self.max_index as i64) as usize] = value;
        self.real = false;
        Ok(())
    }

    /// `(j, coefficient)` pairs in ascending `j`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k = self.max_index as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - k, *c))
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Restriction to the window `-k..=k` (or a zero-padded extension).
    pub fn truncate(&self, k: usize) -> Self {
        Self::from_fn(k, self.real, |j| self.coeff(j))
    }

    /// Largest `|c_{-j} - conj(c_j)|` over the window.
    pub fn hermitian_defect(&self) -> f64 {
        (0..=self.max_index as i64)
            .map(|j| (self.coeff(-j) - self.coeff(j).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Writes `j,re,im` rows sorted by `j`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["j", "re", "im"])?;
        for (j, c) in self.iter() {
            w.write_record([j.to_string(), c.re.to_string(), c.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the `j,re,im` format. The real flag is set when the rows are
    /// exactly Hermitian.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["j", "re", "im"] {
            return Err(Error::Parse(format!("expected header j,re,im, got {headers:?}")));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<&str> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse(format!("short row {rec:?}")))
            };
            let j: i64 = field(0)?
                .parse()
                .map_err(|e| Error::Parse(format!("index: {e}")))?;
            let re: f64 = field(1)?
                .parse()
                .map_err(|e| Error::Parse(format!("re: {e}")))?;
            let im: f64 = field(2)?
                .parse()
                .map_err(|e| Error::Parse(format!("im: {e}")))?;
            rows.push((j, Complex64::new(re, im)));
        }
        let k = rows.len() / 2;
        let expected = -(k as i64)..=(k as i64);
        if rows.len() % 2 == 0 || !rows.iter().map(|r| r.0).eq(expected) {
            return Err(Error::Parse(
                "rows must cover j = -K..=K in ascending order".into(),
            ));
        }
        let mut v = Self {
            max_index: k,
            coeffs: rows.into_iter().map(|r| r.1).collect(),
            real: false,
        };
        v.real = v.hermitian_defect() == 0.0;
        Ok(v)
    }
}

/// `e_j(t) = exp(2πijt)`.
pub fn eval_basis(j: i64, t: f64) -> Complex64 {
    // reduce the phase first so large |j| keeps full precision
    let phase = (j as f64 * t).rem_euclid(1.0);
    Complex64::from_polar(1.0, TAU * phase)
}

/// Equispaced quadrature of `∫₀¹ g(t) e_j(-t) dt` for `|j| <= max_index`.
///
/// Exact for trigonometric polynomials of degree below `nodes - max_index`.
pub fn quadrature_coefficients(
    g: impl Fn(f64) -> f64,
    max_index: usize,
    nodes: usize,
) -> Result<FourierVector> {
    let required = 4 * max_index + 4;
    if nodes < required {
        return Err(Error::Aliasing {
            nodes,
            max_index,
            required,
        });
    }
    let values: Vec<f64> = (0..nodes).map(|i| g(i as f64 / nodes as f64)).collect();
    let n = nodes as i64;
    let mut v = FourierVector::from_fn(max_index, true, |j| {
        let sum: Complex64 = values
            .iter()
            .enumerate()
            .map(|(i, &gi)| {
                // exact integer phase reduction keeps the window Hermitian
                let p = (-(j * i as i64)).rem_euclid(n);
                gi * Complex64::from_polar(1.0, TAU * p as f64 / nodes as f64)
            })
            .sum();
        sum / nodes as f64
    });
    v.real = true;
    Ok(v)
}

/// `Σ_j w(j) |v_j|²` over the stored window.
pub fn weighted_norm_sq(v: &FourierVector, w: &WeightSequence) -> f64 {
    v.iter().map(|(j, c)| w.eval(j) * c.norm_sqr()).sum()
}

/// `⟨a, b⟩_w = Σ_j w(j) a_j conj(b_j)` over the union of both windows.
pub fn weighted_inner(a: &FourierVector, b: &FourierVector, w: &WeightSequence) -> Complex64 {
    let k = a.max_index().min(b.max_index()) as i64;
    (-k..=k)
        .map(|j| w.eval(j) * a.coeff(j) * b.coeff(j).conj())
        .sum()
}

/// Coefficient-wise product, the Fourier image of circular convolution.
/// Works on the smaller of the two windows.
pub fn convolve(a: &FourierVector, b: &FourierVector) -> FourierVector {
    let k = a.max_index().min(b.max_index());
    FourierVector::from_fn(k, a.is_real() && b.is_real(), |j| a.coeff(j) * b.coeff(j))
}

/// `Σ_j v_j e_j(t)`.
pub fn synthesize_complex(v: &FourierVector, t: f64) -> Complex64 {
    v.iter().map(|(j, c)| c * eval_basis(j, t)).sum()
}

/// Real synthesis of a Hermitian window; rejects an imaginary residue above
/// [`REAL_SYNTHESIS_TOL`] relative to `Σ|v_j|`.
pub fn synthesize(v: &FourierVector, t: f64) -> Result<f64> {
    if !v.is_real() {
        return Err(Error::InvalidParameter(
            "real synthesis of a window not flagged real".into(),
        ));
    }
    let z = synthesize_complex(v, t);
    let scale: f64 = v.coefficients().iter().map(|c| c.norm()).sum::<f64>().max(1.0);
    if z.im.abs() > REAL_SYNTHESIS_TOL * scale {
        return Err(Error::ImaginaryResidue { residue: z.im.abs() });
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_values() {
        assert!((eval_basis(0, 0.7) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((eval_basis(1, 0.25) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((eval_basis(-2, 0.5) - c(1.0, 0.0)).norm() < 1e-15);
        for j in -50..50 {
            assert!((eval_basis(j, 0.3137).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_of_simple_functions() {
        let v = quadrature_coefficients(|_| 3.0, 2, 12).unwrap();
        for (j, z) in v.iter() {
            let want = if j == 0 { 3.0 } else { 0.0 };
            assert!((z - c(want, 0.0)).norm() < 1e-14, "j={j}");
        }
        let v = quadrature_coefficients(|t| (TAU * t).cos(), 1, 8).unwrap();
        assert!((v.coeff(-1) - c(0.5, 0.0)).norm() < 1e-14);
        assert!(v.coeff(0).norm() < 1e-14);
        assert!((v.coeff(1) - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn poisson_kernel_quadrature_matches_closed_form() {
        let r: f64 = 0.5;
        let g = |t: f64| (1.0 - r * r) / (1.0 - 2.0 * r * (TAU * t).cos() + r * r);
        let v = quadrature_coefficients(g, 4, 4096).unwrap();
        for (j, z) in v.iter() {
            assert!((z - c(r.powi(j.abs() as i32), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn aliasing_guard() {
        assert!(matches!(
            quadrature_coefficients(|_| 1.0, 4, 19),
            Err(Error::Aliasing { required: 20, .. })
        ));
        assert!(quadrature_coefficients(|_| 1.0, 4, 20).is_ok());
    }

    #[test]
    fn discrete_orthogonality() {
        let k = 6i64;
        let nodes = 4 * k as usize + 4;
        for a in -k..=k {
            for b in -k..=k {
                let s: Complex64 = (0..nodes)
                    .map(|i| {
                        let t = i as f64 / nodes as f64;
                        eval_basis(a, t) * eval_basis(b, t).conj()
                    })
                    .sum::<Complex64>()
                    / nodes as f64;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - c(want, 0.0)).norm() < 1e-13, "{a},{b}");
            }
        }
    }

    #[test]
    fn weighted_norms() {
        let mut v = FourierVector::zeros(1, true);
        v.coeffs[1] = c(2.0, 0.0);
        assert_eq!(weighted_norm_sq(&v, &WeightSequence::Flat), 4.0);
        let v = FourierVector::hermitian(&[c(2.0, 0.0), c(0.5, 0.0)]);
        let w = WeightSequence::pol_growth(1.0);
        assert!((weighted_norm_sq(&v, &w) - 4.5).abs() < 1e-15);
    }

    #[test]
    fn convolution_products() {
        let a = FourierVector::hermitian(&[c(3.0, 0.0), c(1.0, -0.5), c(0.2, 0.1)]);
        let uniform = FourierVector::hermitian(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let out = convolve(&a, &uniform);
        assert!(out.is_real());
        for (j, z) in out.iter() {
            let want = if j == 0 { 3.0 } else { 0.0 };
            assert!((z - c(want, 0.0)).norm() == 0.0);
        }
        let pk = FourierVector::from_fn(6, true, |j| c(0.5f64.powi(j.abs() as i32), 0.0));
        let sq = convolve(&pk, &pk);
        for (j, z) in sq.iter() {
            assert!((z.re - 0.25f64.powi(j.abs() as i32)).abs() < 1e-15);
        }
        let short = pk.truncate(2);
        assert_eq!(convolve(&pk, &short).max_index(), 2);
    }

    #[test]
    fn synthesis() {
        let v = FourierVector::hermitian(&[c(1.7, 0.0)]);
        assert!((synthesize(&v, 0.33).unwrap() - 1.7).abs() < 1e-15);
        let cosine = FourierVector::hermitian(&[c(0.0, 0.0), c(0.5, 0.0)]);
        assert!((synthesize(&cosine, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let pk = FourierVector::from_fn(80, true, |j| c(0.5f64.powi(j.abs() as i32), 0.0));
        assert!((synthesize(&pk, 0.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn synthesis_rejects_imaginary_residue() {
        let mut v = FourierVector::hermitian(&[c(1.0, 0.0), c(0.3, 0.2)]);
        // break symmetry while keeping the flag
        v.coeffs[0] = c(0.3, 0.2);
        assert!(matches!(synthesize(&v, 0.1), Err(Error::ImaginaryResidue { .. })));
        let mut w = v.clone();
        w.set(1, c(0.0, 0.0)).unwrap();
        assert!(!w.is_real());
        assert!(synthesize(&w, 0.1).is_err());
        assert!(synthesize_complex(&w, 0.1).norm() > 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let v = FourierVector::hermitian(&[c(2.0, 0.0), c(0.1, -0.3), c(1e-17, 3.5)]);
        let mut buf = Vec::new();
        v.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("j,re,im\n-2,"));
        let back = FourierVector::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, v);
        assert!(FourierVector::read_csv("j,re,im\n0,1,0\n1,0,0\n".as_bytes()).is_err());
        assert!(FourierVector::read_csv("a,b,c\n0,1,0\n".as_bytes()).is_err());
    }
}
