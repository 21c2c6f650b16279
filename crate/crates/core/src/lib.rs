//! Dynamic two-component Gaussian mixtures.
//!
//! The mixture weight `alpha_t` is allowed to vary over time. It is modelled
//! through a probit link on a wavelet expansion, `alpha = Phi(W^T theta)`, and
//! the wavelet coefficients carry spike-and-slab priors whose hyperparameters
//! are chosen per resolution level by marginal maximum likelihood. A Gibbs
//! sampler with probit data augmentation draws the component parameters, the
//! allocations, the latent probit variables and the coefficients in turn.
//!
//! Module map:
//!
//! - [`wavelet`]: periodic orthonormal DWT / IDWT and coefficient layout.
//! - [`distributions`]: seedable streams, normal special functions, samplers.
//! - [`shrinkage`]: spike-and-slab densities, posterior draws, empirical Bayes.
//! - [`gibbs`]: the sampler itself.
//! - [`inference`]: medians, HPD intervals, regimes and change points.
//! - [`simgen`]: weight curves, synthetic data and the Monte Carlo driver.
//! - [`cli`]: ingestion, configuration and the `fit` / `simulate` / `mc` commands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod distributions;
mod error;
pub mod gibbs;
pub mod inference;
pub mod optim;
pub mod shrinkage;
pub mod simgen;
pub mod wavelet;

pub use error::{Error, Result};
