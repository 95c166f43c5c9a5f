//! Variance function estimation for the heteroscedastic regression model
//! `y_i = f(x_i) + V(x_i)^{1/2} z_i`.
//!
//! The crate is organised around a handful of modules:
//!
//! - [`kernel`]: vanishing-moment interior and boundary kernels and their
//!   bin-integrated weights.
//! - [`diffvar`]: the first-order-difference estimator, which kernel-smooths
//!   `D_i^2 / 2` with `D_i = y_i - y_{i+1}`.
//! - [`residvar`]: the residual-based two-step comparator (local linear mean
//!   fit, then local linear smoothing of squared residuals).
//! - [`modelsel`]: K-fold cross-validated bandwidths and the CDMSE metric.
//! - [`simlab`]: data generation, the four-mean simulation study and
//!   empirical convergence-rate fits.
//! - [`boundlab`]: numerical tools for the two-point lower bound: the
//!   moment-matched discrete distribution, Hellinger affinities and the
//!   adversarial rough mean.
//!
//! Everything is a pure function of its inputs. Randomness is always driven
//! by explicit seeds (see [`rng`]).

pub mod boundlab;
pub mod diffvar;
mod error;
pub mod kernel;
pub mod modelsel;
pub mod quadrature;
pub mod residvar;
pub mod rng;
pub mod sample;
pub mod simlab;
pub mod stats;

pub use error::{Error, Result};
pub use sample::{Design, Sample};
