//! Data-augmentation Gibbs sampler for the dynamic two-component mixture
//!
//! ```text
//! y_t = (1 - z_t) x_1t + z_t x_2t,   x_kt ~ N(mu_k, 1 / tau2_k)
//! z_t ~ Bern(alpha_t),               alpha = Phi(W^T theta)
//! ```
//!
//! with probit latents `l_t ~ N((W^T theta)_t, 1)`, `z_t = 1{l_t > 0}`, and
//! spike-and-slab priors on the detail coefficients of `theta`. One sweep
//! updates, in order: `mu_1, tau2_1, mu_2, tau2_2`; the `mu_1 <= mu_2` label
//! ordering; `z`; `l`; the per-level hyperparameters; `theta`; `alpha`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    bernoulli, ln_normal_density, normal_cdf, sample_gamma, sample_truncated_normal,
    standard_normal, RngStream, Side,
};
use crate::shrinkage::{
    fit_all_levels_with, sample_coefficient, FamilyKind, LevelHyperParams, MIN_LEVEL_SIZE,
};
use crate::wavelet::{dyadic_levels, CoefficientVector, Transform, WaveletFilter};
use crate::{Error, Result};

/// Smallest series the sampler accepts.
pub const MIN_SERIES_LEN: usize = 8;

/// Conjugate priors `mu_k ~ N(b0_k, big_b0_k)` and `tau2_k ~ Gamma(c0_k, big_c0_k)`
/// (shape, rate). Index 0 is component 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub mean_prior_mean: [f64; 2],
    pub mean_prior_variance: [f64; 2],
    pub precision_prior_shape: [f64; 2],
    pub precision_prior_rate: [f64; 2],
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        for k in 0..2 {
            let vals = [
                self.mean_prior_variance[k],
                self.precision_prior_shape[k],
                self.precision_prior_rate[k],
            ];
            if vals.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(Error::invalid(format!(
                    "prior for component {} needs positive variance, shape and rate",
                    k + 1
                )));
            }
            if !self.mean_prior_mean[k].is_finite() {
                return Err(Error::invalid("prior mean must be finite"));
            }
        }
        Ok(())
    }
}

/// Default shape and rate of the precision priors.
pub const DEFAULT_GAMMA_PRIOR: f64 = 0.01;

/// Quantile with linear interpolation between order statistics ("type 7").
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sample_variance(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

fn sorted_copy(y: &[f64]) -> Vec<f64> {
    let mut s = y.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Data-driven priors: means at the first and third quartiles, both mean
/// variances at the sample variance, `Gamma(0.01, 0.01)` on the precisions.
pub fn default_priors_from_data(y: &[f64]) -> Result<PriorSpec> {
    if y.len() < 4 {
        return Err(Error::TooShort {
            len: y.len(),
            min: 4,
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("series contains non-finite values"));
    }
    let s2 = sample_variance(y);
    if !(s2 > 0.0) {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    let sorted = sorted_copy(y);
    Ok(PriorSpec {
        mean_prior_mean: [
            quantile_sorted(&sorted, 0.25),
            quantile_sorted(&sorted, 0.75),
        ],
        mean_prior_variance: [s2, s2],
        precision_prior_shape: [DEFAULT_GAMMA_PRIOR; 2],
        precision_prior_rate: [DEFAULT_GAMMA_PRIOR; 2],
    })
}

/// `(mu_1, mu_2)` and precisions `(tau2_1, tau2_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentParams {
    pub mu: [f64; 2],
    pub tau2: [f64; 2],
}

impl ComponentParams {
    /// Swaps the `(mu, tau2)` pairs when `mu_2 < mu_1`.
    pub fn enforce_ordering(self) -> Self {
        if self.mu[1] < self.mu[0] {
            ComponentParams {
                mu: [self.mu[1], self.mu[0]],
                tau2: [self.tau2[1], self.tau2[0]],
            }
        } else {
            self
        }
    }
}

/// Conjugate draws of `mu_1, tau2_1, mu_2, tau2_2` in that order.
///
/// Each `mu_k` conditions on `tau2_current[k]`; each `tau2_k` on the `mu_k`
/// just drawn. `z[t] == false` allocates `y[t]` to component 1.
pub fn update_component_params<R: Rng + ?Sized>(
    rng: &mut R,
    y: &[f64],
    z: &[bool],
    priors: &PriorSpec,
    tau2_current: [f64; 2],
) -> Result<ComponentParams> {
    if y.len() != z.len() {
        return Err(Error::invalid("y and z lengths differ"));
    }
    let mut mu = [0.0; 2];
    let mut tau2 = [0.0; 2];
    for k in 0..2 {
        let member = k == 1;
        let (count, sum) = y
            .iter()
            .zip(z)
            .filter(|(_, &zt)| zt == member)
            .fold((0usize, 0.0), |(c, s), (&yt, _)| (c + 1, s + yt));
        let b0 = priors.mean_prior_mean[k];
        let big_b0 = priors.mean_prior_variance[k];
        let post_var = 1.0 / (1.0 / big_b0 + tau2_current[k] * count as f64);
        let post_mean = post_var * (tau2_current[k] * sum + b0 / big_b0);
        mu[k] = post_mean + post_var.sqrt() * standard_normal(rng);

        let ss: f64 = y
            .iter()
            .zip(z)
            .filter(|(_, &zt)| zt == member)
            .map(|(&yt, _)| (yt - mu[k]) * (yt - mu[k]))
            .sum();
        let shape = priors.precision_prior_shape[k] + 0.5 * count as f64;
        let rate = priors.precision_prior_rate[k] + 0.5 * ss;
        tau2[k] = sample_gamma(rng, shape, rate)?;
    }
    Ok(ComponentParams { mu, tau2 })
}

/// Probability that `z_t = 1` given everything else.
#[inline]
pub fn allocation_probability(y: f64, params: &ComponentParams, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    if alpha >= 1.0 {
        return 1.0;
    }
    let l2 = ln_normal_density(y, params.mu[1], 1.0 / params.tau2[1]);
    let l1 = ln_normal_density(y, params.mu[0], 1.0 / params.tau2[0]);
    let top = l1.max(l2);
    let w2 = alpha * (l2 - top).exp();
    let w1 = (1.0 - alpha) * (l1 - top).exp();
    w2 / (w2 + w1)
}

/// Draws every `z_t` from its Bernoulli full conditional.
pub fn update_allocations<R: Rng + ?Sized>(
    rng: &mut R,
    y: &[f64],
    params: &ComponentParams,
    alpha: &[f64],
    z: &mut [bool],
) {
    assert_eq!(y.len(), alpha.len());
    assert_eq!(y.len(), z.len());
    for ((zt, &yt), &at) in z.iter_mut().zip(y).zip(alpha) {
        *zt = bernoulli(rng, allocation_probability(yt, params, at));
    }
}

/// Draws `l_t ~ N((W^T theta)_t, 1)` truncated to the half-line matching `z_t`.
pub fn update_latents<R: Rng + ?Sized>(
    rng: &mut R,
    z: &[bool],
    theta: &[f64],
    transform: &mut Transform,
    l: &mut [f64],
) {
    transform.inverse_into(theta, l);
    for (lt, &zt) in l.iter_mut().zip(z) {
        let side = if zt { Side::Positive } else { Side::Negative };
        *lt = sample_truncated_normal(rng, *lt, side);
    }
}

/// Draws `theta` given the empirical coefficients `d* = W l`.
///
/// The scaling slot has a flat prior, so it is `N(d*_1, 1)`; every detail slot
/// goes through its level's spike-and-slab posterior.
pub fn update_coefficients<R: Rng + ?Sized>(
    rng: &mut R,
    empirical: &CoefficientVector,
    hyper: &[LevelHyperParams],
    theta: &mut [f64],
) {
    assert_eq!(empirical.len(), theta.len());
    assert_eq!(hyper.len(), empirical.levels());
    theta[0] = empirical.scaling() + standard_normal(rng);
    for (j, params) in hyper.iter().enumerate() {
        let range = (1 << j)..(2 << j);
        for (th, &d) in theta[range].iter_mut().zip(empirical.level(j)) {
            *th = sample_coefficient(rng, d, params);
        }
    }
}

/// `alpha = Phi(W^T theta)`.
pub fn compute_weights(theta: &[f64], transform: &mut Transform, alpha: &mut [f64]) {
    transform.inverse_into(theta, alpha);
    for a in alpha.iter_mut() {
        *a = normal_cdf(*a);
    }
}

/// Sampler schedule and options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Stream of `seed` this chain draws from.
    #[serde(default)]
    pub stream_id: u64,
    pub family: FamilyKind,
    pub filter: WaveletFilter,
    /// Refit the level hyperparameters every this many sweeps. Values above 1
    /// depart from refitting inside every sweep.
    pub hyperparam_refit_every: usize,
    /// Levels with fewer coefficients than this reuse the fit of the coarsest
    /// level that has enough. 1 fits every level on its own.
    #[serde(default = "default_min_level_size")]
    pub min_level_size: usize,
    #[serde(default)]
    pub store_z: bool,
    #[serde(default)]
    pub store_theta: bool,
}

fn default_min_level_size() -> usize {
    MIN_LEVEL_SIZE
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            iterations: 6000,
            burn_in: 1000,
            thin: 5,
            seed: 1,
            stream_id: 0,
            family: FamilyKind::Laplace,
            filter: WaveletFilter::coif3(),
            hyperparam_refit_every: 1,
            min_level_size: MIN_LEVEL_SIZE,
            store_z: false,
            store_theta: false,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be positive"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::invalid(format!(
                "burn-in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        if self.hyperparam_refit_every == 0 {
            return Err(Error::invalid("hyperparam_refit_every must be at least 1"));
        }
        if self.min_level_size == 0 {
            return Err(Error::invalid("min_level_size must be at least 1"));
        }
        Ok(())
    }

    /// Number of retained draws.
    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

/// Retained post-burn-in, thinned draws.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorChains {
    pub n: usize,
    /// 1-based sweep index of each retained draw.
    pub iteration: Vec<usize>,
    pub mu: [Vec<f64>; 2],
    pub tau2: [Vec<f64>; 2],
    /// Row-major `m x n`.
    pub alpha: Vec<f64>,
    pub z: Option<Vec<bool>>,
    pub theta: Option<Vec<f64>>,
}

impl PosteriorChains {
    fn with_capacity(n: usize, m: usize, store_z: bool, store_theta: bool) -> Self {
        PosteriorChains {
            n,
            iteration: Vec::with_capacity(m),
            mu: [Vec::with_capacity(m), Vec::with_capacity(m)],
            tau2: [Vec::with_capacity(m), Vec::with_capacity(m)],
            alpha: Vec::with_capacity(m * n),
            z: store_z.then(|| Vec::with_capacity(m * n)),
            theta: store_theta.then(|| Vec::with_capacity(m * n)),
        }
    }

    /// Builds chains from already-collected columns (e.g. read back from disk).
    pub fn from_parts(
        n: usize,
        iteration: Vec<usize>,
        mu: [Vec<f64>; 2],
        tau2: [Vec<f64>; 2],
        alpha: Vec<f64>,
    ) -> Result<Self> {
        let m = iteration.len();
        if mu.iter().chain(&tau2).any(|c| c.len() != m) || alpha.len() != m * n {
            return Err(Error::invalid("chain columns have inconsistent lengths"));
        }
        Ok(PosteriorChains {
            n,
            iteration,
            mu,
            tau2,
            alpha,
            z: None,
            theta: None,
        })
    }

    pub fn len(&self) -> usize {
        self.iteration.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iteration.is_empty()
    }

    pub fn alpha_draw(&self, i: usize) -> &[f64] {
        &self.alpha[i * self.n..(i + 1) * self.n]
    }

    /// All retained draws of `alpha_t` (0-based `t`).
    pub fn alpha_at(&self, t: usize) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.alpha[i * self.n + t])
            .collect()
    }

    pub fn theta_draw(&self, i: usize) -> Option<&[f64]> {
        self.theta
            .as_ref()
            .map(|th| &th[i * self.n..(i + 1) * self.n])
    }

    pub fn z_draw(&self, i: usize) -> Option<&[bool]> {
        self.z.as_ref().map(|z| &z[i * self.n..(i + 1) * self.n])
    }
}

/// Full sampler state after a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub params: ComponentParams,
    pub z: Vec<bool>,
    pub l: Vec<f64>,
    pub theta: CoefficientVector,
    pub alpha: Vec<f64>,
}

impl ModelState {
    /// Data-driven start: `z_t = 1{y_t > median}`, `mu = (q1, q3)`,
    /// `tau2 = (1/s^2, 1/s^2)`, `theta = 0`, `alpha = 0.5`.
    pub fn initial(y: &[f64]) -> Result<Self> {
        let n = y.len();
        let sorted = sorted_copy(y);
        let median = quantile_sorted(&sorted, 0.5);
        let s2 = sample_variance(y);
        if !(s2 > 0.0) {
            return Err(Error::Degenerate("series has zero variance".into()));
        }
        let z: Vec<bool> = y.iter().map(|&v| v > median).collect();
        let half_normal_mean = (2.0 / std::f64::consts::PI).sqrt();
        let l = z
            .iter()
            .map(|&zt| {
                if zt {
                    half_normal_mean
                } else {
                    -half_normal_mean
                }
            })
            .collect();
        Ok(ModelState {
            params: ComponentParams {
                mu: [
                    quantile_sorted(&sorted, 0.25),
                    quantile_sorted(&sorted, 0.75),
                ],
                tau2: [1.0 / s2, 1.0 / s2],
            },
            z,
            l,
            theta: CoefficientVector::zeros(n)?,
            alpha: vec![0.5; n],
        })
    }

    /// Swaps the component pairs when `mu_2 < mu_1`; nothing else changes.
    pub fn enforce_ordering(mut self) -> Self {
        self.params = self.params.enforce_ordering();
        self
    }
}

/// Stateful sampler for one chain.
pub struct Sampler<'a> {
    y: &'a [f64],
    priors: PriorSpec,
    family: FamilyKind,
    refit_every: usize,
    min_level_size: usize,
    transform: Transform,
    rng: RngStream,
    state: ModelState,
    empirical: CoefficientVector,
    hyper: Vec<LevelHyperParams>,
    sweeps: usize,
}

fn check_series(y: &[f64]) -> Result<()> {
    dyadic_levels(y.len()).map_err(|_| {
        Error::invalid(format!(
            "series length {} is not a power of two; pad or truncate it (the CLI offers --length-policy truncate)",
            y.len()
        ))
    })?;
    if y.len() < MIN_SERIES_LEN {
        return Err(Error::TooShort {
            len: y.len(),
            min: MIN_SERIES_LEN,
        });
    }
    if let Some(t) = y.iter().position(|v| v.is_nan()) {
        return Err(Error::invalid(format!("y[{}] is NaN", t + 1)));
    }
    if y.iter().any(|v| v.is_infinite()) {
        return Err(Error::invalid("series contains infinite values"));
    }
    Ok(())
}

impl<'a> Sampler<'a> {
    /// Draws from stream `(config.seed, config.stream_id)`.
    pub fn new(y: &'a [f64], config: &ChainConfig, priors: PriorSpec) -> Result<Self> {
        let rng = RngStream::new(config.seed, config.stream_id);
        Self::with_rng(y, config, priors, rng)
    }

    pub fn with_rng(
        y: &'a [f64],
        config: &ChainConfig,
        priors: PriorSpec,
        rng: RngStream,
    ) -> Result<Self> {
        check_series(y)?;
        Self::with_state(y, config, priors, ModelState::initial(y)?, rng)
    }

    /// Starts from a caller-supplied state.
    pub fn with_state(
        y: &'a [f64],
        config: &ChainConfig,
        priors: PriorSpec,
        state: ModelState,
        rng: RngStream,
    ) -> Result<Self> {
        check_series(y)?;
        config.validate()?;
        priors.validate()?;
        let n = y.len();
        if state.z.len() != n
            || state.l.len() != n
            || state.alpha.len() != n
            || state.theta.len() != n
        {
            return Err(Error::invalid(
                "initial state does not match the series length",
            ));
        }
        Ok(Sampler {
            y,
            priors,
            family: config.family,
            refit_every: config.hyperparam_refit_every,
            min_level_size: config.min_level_size,
            transform: Transform::new(config.filter.clone(), n)?,
            rng,
            empirical: CoefficientVector::zeros(n)?,
            hyper: Vec::new(),
            state,
            sweeps: 0,
        })
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    /// Hyperparameters used by the latest coefficient update.
    pub fn hyperparams(&self) -> &[LevelHyperParams] {
        &self.hyper
    }

    /// One full Gibbs sweep.
    pub fn sweep(&mut self) -> Result<()> {
        let s = &mut self.state;
        s.params =
            update_component_params(&mut self.rng, self.y, &s.z, &self.priors, s.params.tau2)?
                .enforce_ordering();
        update_allocations(&mut self.rng, self.y, &s.params, &s.alpha, &mut s.z);
        update_latents(
            &mut self.rng,
            &s.z,
            s.theta.as_slice(),
            &mut self.transform,
            &mut s.l,
        );
        self.transform
            .forward_into(&s.l, self.empirical.as_mut_slice());
        if self.hyper.is_empty() || self.sweeps.is_multiple_of(self.refit_every) {
            self.hyper = fit_all_levels_with(&self.empirical, self.family, self.min_level_size)?;
        }
        update_coefficients(
            &mut self.rng,
            &self.empirical,
            &self.hyper,
            s.theta.as_mut_slice(),
        );
        compute_weights(s.theta.as_slice(), &mut self.transform, &mut s.alpha);
        self.sweeps += 1;
        Ok(())
    }
}

/// Runs the full chain and returns the retained draws.
pub fn run_chain(y: &[f64], config: &ChainConfig, priors: &PriorSpec) -> Result<PosteriorChains> {
    let rng = RngStream::new(config.seed, config.stream_id);
    run_chain_with_rng(y, config, priors, rng)
}

/// [`run_chain`] drawing from an already-positioned stream.
pub fn run_chain_with_rng(
    y: &[f64],
    config: &ChainConfig,
    priors: &PriorSpec,
    rng: RngStream,
) -> Result<PosteriorChains> {
    let mut sampler = Sampler::with_rng(y, config, *priors, rng)?;
    let n = y.len();
    let mut chains =
        PosteriorChains::with_capacity(n, config.retained(), config.store_z, config.store_theta);
    for i in 1..=config.iterations {
        sampler.sweep()?;
        if i > config.burn_in && (i - config.burn_in).is_multiple_of(config.thin) {
            let s = sampler.state();
            chains.iteration.push(i);
            for k in 0..2 {
                chains.mu[k].push(s.params.mu[k]);
                chains.tau2[k].push(s.params.tau2[k]);
            }
            chains.alpha.extend_from_slice(&s.alpha);
            if let Some(z) = chains.z.as_mut() {
                z.extend_from_slice(&s.z);
            }
            if let Some(th) = chains.theta.as_mut() {
                th.extend_from_slice(s.theta.as_slice());
            }
        }
    }
    Ok(chains)
}
