//! Nonparametric estimation of the intensity of a Poisson point process on
//! the circle from noisy observations, when the noise density is itself only
//! known through an auxiliary sample.
//!
//! The crate is organised bottom-up:
//!
//! - [`circular`]: Fourier coefficients on `[0, 1)`, weight sequences and
//!   weighted norms.
//! - [`models`]: concrete intensity and error-density families with exact
//!   coefficients, together with the smoothness classes they belong to.
//! - [`simulate`]: Poisson process sampling, additive circular contamination
//!   and deterministic random substreams.
//! - [`estimate`]: empirical coefficients and the thresholded series
//!   estimator, plus exact weighted risk against a known truth.
//! - [`select`]: the rate functionals, the oracle dimension and the two
//!   penalized-contrast dimension selectors.
//! - [`bench`]: Monte Carlo experiments, slope regressions, event
//!   diagnostics and the invariant suite behind the `check` subcommand.

pub mod bench;
pub mod circular;
pub mod error;
pub mod estimate;
pub mod models;
pub mod select;
pub mod simulate;

pub use error::{Error, Result};
