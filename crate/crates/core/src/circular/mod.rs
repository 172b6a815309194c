//! Fourier analysis on the circle `[0, 1)`.
//!
//! Functions are represented by finite symmetric windows of their Fourier
//! coefficients `[g]_j = ∫₀¹ g(t) e_j(-t) dt` with `e_j(t) = exp(2πijt)`.

mod fourier;
mod weights;

pub use fourier::{
    convolve, eval_basis, quadrature_coefficients, synthesize, synthesize_complex,
    weighted_inner, weighted_norm_sq, FourierVector, REAL_SYNTHESIS_TOL,
};
pub use weights::WeightSequence;
