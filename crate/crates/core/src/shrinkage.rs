//! Spike-and-slab priors on wavelet detail coefficients.
//!
//! Each detail coefficient is a point mass at zero with probability `1 - pi_j`
//! and a draw from the slab (Gaussian or Laplace) otherwise. The observed
//! coefficient adds unit-variance Gaussian noise, so the slab marginal is the
//! convolution `g = slab * phi`. Every density ratio here is computed in log
//! space; for `|d|` near 40 the raw densities underflow.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    bernoulli, ln_mills_ratio, ln_normal_pdf, log_add_exp, mills_ratio, sample_truncated_normal,
    standard_normal, Side,
};
use crate::optim;
use crate::wavelet::CoefficientVector;
use crate::{Error, Result};

/// Smallest sparsity weight the empirical Bayes fit may return.
pub const PI_MIN: f64 = 1e-3;
pub const PI_MAX: f64 = 1.0;
/// Box for the Gaussian slab variance `v_j^2`.
pub const GAUSSIAN_VARIANCE_BOUNDS: (f64, f64) = (1e-4, 1e4);
/// Box for the Laplace slab rate `a`.
pub const LAPLACE_SCALE_BOUNDS: (f64, f64) = (0.1, 3.0);
/// Default for [`fit_all_levels_with`]: every level gets its own fit.
pub const MIN_LEVEL_SIZE: usize = 1;
/// Below this the Mills ratio is handled in log space.
const MILLS_LOG_CUTOFF: f64 = -30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Gaussian,
    Laplace,
}

impl FamilyKind {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            FamilyKind::Gaussian => GAUSSIAN_VARIANCE_BOUNDS,
            FamilyKind::Laplace => LAPLACE_SCALE_BOUNDS,
        }
    }

    pub fn slab(self, parameter: f64) -> SlabFamily {
        match self {
            FamilyKind::Gaussian => SlabFamily::Gaussian {
                variance: parameter,
            },
            FamilyKind::Laplace => SlabFamily::Laplace { scale: parameter },
        }
    }

    /// Short acronym of the prior (SSG / SSL).
    pub fn acronym(self) -> &'static str {
        match self {
            FamilyKind::Gaussian => "SSG",
            FamilyKind::Laplace => "SSL",
        }
    }
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FamilyKind::Gaussian => "gaussian",
            FamilyKind::Laplace => "laplace",
        })
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "ssg" | "normal" => Ok(FamilyKind::Gaussian),
            "laplace" | "ssl" => Ok(FamilyKind::Laplace),
            other => Err(Error::invalid(format!("unknown slab family '{other}'"))),
        }
    }
}

/// The continuous part of the prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SlabFamily {
    /// `N(0, variance)`.
    Gaussian { variance: f64 },
    /// Laplace density `(a/2) exp(-a|x|)` with `a = scale`.
    Laplace { scale: f64 },
}

impl SlabFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            SlabFamily::Gaussian { .. } => FamilyKind::Gaussian,
            SlabFamily::Laplace { .. } => FamilyKind::Laplace,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            SlabFamily::Gaussian { variance } => variance,
            SlabFamily::Laplace { scale } => scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.parameter();
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::invalid(format!(
                "slab parameter must be positive, got {p}"
            )));
        }
        Ok(())
    }
}

/// Hyperparameters of one resolution level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelHyperParams {
    pub level: usize,
    pub pi: f64,
    pub slab: SlabFamily,
}

impl LevelHyperParams {
    pub fn new(level: usize, pi: f64, slab: SlabFamily) -> Result<Self> {
        if !(0.0..=1.0).contains(&pi) {
            return Err(Error::invalid(format!("pi must lie in [0, 1], got {pi}")));
        }
        slab.validate()?;
        Ok(LevelHyperParams { level, pi, slab })
    }
}

/// `ln g(d)` where `g` is the slab convolved with a standard normal.
pub fn log_marginal_density(d: f64, slab: SlabFamily) -> f64 {
    ln_normal_pdf(d) + log_slab_ratio(d, slab)
}

/// `ln(g(d) / phi(d))`.
///
/// For the Laplace slab `g/phi = (a/2) [R(a - d) + R(a + d)]` with `R` the
/// Mills ratio, which avoids cancellation between the two tails.
pub fn log_slab_ratio(d: f64, slab: SlabFamily) -> f64 {
    match slab {
        SlabFamily::Gaussian { variance } => {
            -0.5 * variance.ln_1p() + 0.5 * d * d * variance / (1.0 + variance)
        }
        SlabFamily::Laplace { scale: a } => {
            let ad = d.abs();
            let near = a - ad;
            if near > MILLS_LOG_CUTOFF {
                (0.5 * a).ln() + (mills_ratio(near) + mills_ratio(a + ad)).ln()
            } else {
                // R(a + |d|) < 1/30 is negligible next to R(a - |d|) > e^450.
                (0.5 * a).ln() + ln_mills_ratio(near)
            }
        }
    }
}

#[inline]
fn nonzero_log_odds(log_ratio: f64, pi: f64) -> f64 {
    pi.ln() + log_ratio - (-pi).ln_1p()
}

#[inline]
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Posterior probability that the coefficient is nonzero (`pi_post`).
pub fn posterior_spike_weight(d: f64, pi: f64, slab: SlabFamily) -> f64 {
    if pi <= 0.0 {
        return 0.0;
    }
    if pi >= 1.0 {
        return 1.0;
    }
    logistic(nonzero_log_odds(log_slab_ratio(d, slab), pi))
}

/// Weight of the positive truncated-normal branch of the Laplace-slab posterior.
pub fn eta_weight(d: f64, a: f64) -> f64 {
    // e^{-ad} Phi(d - a) : e^{ad} Phi(-d - a)  =  R(a - d) : R(a + d)
    if a - d.abs() > MILLS_LOG_CUTOFF {
        let (p, n) = (mills_ratio(a - d), mills_ratio(a + d));
        p / (p + n)
    } else {
        logistic(ln_mills_ratio(a - d) - ln_mills_ratio(a + d))
    }
}

/// Draws a coefficient from its spike-and-slab posterior given the noisy value `d`.
pub fn sample_coefficient<R: Rng + ?Sized>(rng: &mut R, d: f64, params: &LevelHyperParams) -> f64 {
    let pi_post = posterior_spike_weight(d, params.pi, params.slab);
    if !bernoulli(rng, pi_post) {
        return 0.0;
    }
    sample_slab_posterior(rng, d, params.slab)
}

/// Draw from the nonzero part of the posterior.
pub fn sample_slab_posterior<R: Rng + ?Sized>(rng: &mut R, d: f64, slab: SlabFamily) -> f64 {
    match slab {
        SlabFamily::Gaussian { variance } => {
            let shrink = variance / (1.0 + variance);
            shrink * d + shrink.sqrt() * standard_normal(rng)
        }
        SlabFamily::Laplace { scale: a } => {
            if bernoulli(rng, eta_weight(d, a)) {
                sample_truncated_normal(rng, d - a, Side::Positive)
            } else {
                sample_truncated_normal(rng, d + a, Side::Negative)
            }
        }
    }
}

/// `sum_i ln[(1 - pi) phi(d_i) + pi g(d_i)]`.
pub fn log_marginal_likelihood(level_coeffs: &[f64], pi: f64, slab: SlabFamily) -> Result<f64> {
    if level_coeffs.is_empty() {
        return Err(Error::invalid("marginal likelihood of an empty level"));
    }
    if !(0.0..=1.0).contains(&pi) {
        return Err(Error::invalid(format!("pi must lie in [0, 1], got {pi}")));
    }
    slab.validate()?;
    Ok(level_coeffs
        .iter()
        .map(|&d| mixture_term(ln_normal_pdf(d), log_marginal_density(d, slab), pi))
        .sum())
}

#[inline]
fn mixture_term(log_phi: f64, log_g: f64, pi: f64) -> f64 {
    let spike = if pi < 1.0 {
        (-pi).ln_1p() + log_phi
    } else {
        f64::NEG_INFINITY
    };
    let slab = if pi > 0.0 {
        pi.ln() + log_g
    } else {
        f64::NEG_INFINITY
    };
    log_add_exp(spike, slab)
}

/// Log-spaced grid over the slab parameter, refined afterwards by Brent.
const PARAM_GRID: usize = 25;
/// Ratios `g/phi` above `e^600` are kept in log space.
const RATIO_LOG_CUTOFF: f64 = 600.0;

/// Per-level log-likelihood with `pi` maximized out, for a fixed slab.
struct Profile<'a> {
    coeffs: &'a [f64],
    kind: FamilyKind,
    excess: Vec<f64>,
    huge: Vec<f64>,
}

impl<'a> Profile<'a> {
    fn new(coeffs: &'a [f64], kind: FamilyKind) -> Self {
        Profile {
            coeffs,
            kind,
            excess: Vec::with_capacity(coeffs.len()),
            huge: Vec::new(),
        }
    }

    /// `(sum_i ln[(1 - pi) + pi g_i/phi_i], pi)` at the best `pi`.
    fn at(&mut self, ln_param: f64) -> (f64, f64) {
        let slab = self.kind.slab(ln_param.exp());
        self.excess.clear();
        self.huge.clear();
        for &d in self.coeffs {
            let r = log_slab_ratio(d, slab);
            if r < RATIO_LOG_CUTOFF {
                self.excess.push(r.exp_m1());
            } else {
                self.huge.push(r);
            }
        }
        let (excess, huge) = (&self.excess, self.huge.len() as f64);
        // The objective is concave in pi; its derivative is decreasing.
        let pi = optim::decreasing_root(
            |pi| {
                let (mut g, mut h) = (huge / pi, -huge / (pi * pi));
                for &b in excess {
                    let q = b / (1.0 + pi * b);
                    g += q;
                    h -= q * q;
                }
                (g, h)
            },
            PI_MIN,
            PI_MAX,
            1e-13,
        );
        let (ln_pi, ln_1m) = (pi.ln(), (-pi).ln_1p());
        let value = excess.iter().map(|&b| (pi * b).ln_1p()).sum::<f64>()
            + self
                .huge
                .iter()
                .map(|&r| log_add_exp(ln_1m, ln_pi + r))
                .sum::<f64>();
        (value, pi)
    }
}

fn better(candidate: (f64, f64), incumbent: (f64, f64)) -> bool {
    let tie = (candidate.0 - incumbent.0).abs() <= 1e-12 * (1.0 + incumbent.0.abs());
    if tie {
        candidate.1 < incumbent.1
    } else {
        candidate.0 > incumbent.0
    }
}

/// Marginal maximum likelihood estimate of `(pi_j, slab parameter)` for one level.
///
/// For a fixed slab parameter the log-likelihood is concave in `pi`, so `pi`
/// is solved exactly and only the log slab parameter is searched: a grid
/// scan, then Brent between the neighbours of the best grid point.
/// Near-ties go to the smaller `pi`. The returned `level` is `log2(len)` when
/// the length is a power of two and 0 otherwise.
pub fn fit_level_hyperparams(level_coeffs: &[f64], kind: FamilyKind) -> Result<LevelHyperParams> {
    if level_coeffs.is_empty() {
        return Err(Error::invalid(
            "cannot fit hyperparameters to an empty level",
        ));
    }
    if level_coeffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("non-finite wavelet coefficient"));
    }
    let (p_lo, p_hi) = kind.bounds();
    let (x_lo, x_hi) = (p_lo.ln(), p_hi.ln());
    let step = (x_hi - x_lo) / (PARAM_GRID - 1) as f64;
    let mut profile = Profile::new(level_coeffs, kind);

    let mut best_k = 0;
    let mut best = (f64::NEG_INFINITY, f64::INFINITY, x_lo);
    for k in 0..PARAM_GRID {
        let x = if k + 1 == PARAM_GRID {
            x_hi
        } else {
            x_lo + k as f64 * step
        };
        let (value, pi) = profile.at(x);
        if better((value, pi), (best.0, best.1)) {
            best = (value, pi, x);
            best_k = k;
        }
    }
    let lo = x_lo + best_k.saturating_sub(1) as f64 * step;
    let hi = (x_lo + (best_k + 1) as f64 * step).min(x_hi);
    let m = optim::brent(|x| -profile.at(x).0, lo, hi, 1e-9, 100);
    let (value, pi) = profile.at(m.x);
    if better((value, pi), (best.0, best.1)) {
        best = (value, pi, m.x);
    }

    let level = if level_coeffs.len().is_power_of_two() {
        level_coeffs.len().trailing_zeros() as usize
    } else {
        0
    };
    Ok(LevelHyperParams {
        level,
        pi: best.1.clamp(PI_MIN, PI_MAX),
        slab: kind.slab(best.2.exp().clamp(p_lo, p_hi)),
    })
}

/// Fits hyperparameters for every detail level of `coeffs`, one level at a time.
pub fn fit_all_levels(
    coeffs: &CoefficientVector,
    kind: FamilyKind,
) -> Result<Vec<LevelHyperParams>> {
    fit_all_levels_with(coeffs, kind, MIN_LEVEL_SIZE)
}

/// Like [`fit_all_levels`], but levels with fewer than `min_size` coefficients
/// reuse the fit of the coarsest level that has at least that many. When no
/// level is large enough, one fit over all detail coefficients is shared.
pub fn fit_all_levels_with(
    coeffs: &CoefficientVector,
    kind: FamilyKind,
    min_size: usize,
) -> Result<Vec<LevelHyperParams>> {
    let levels = coeffs.levels();
    let first_full = (0..levels).find(|&j| (1usize << j) >= min_size);
    let mut out = Vec::with_capacity(levels);
    match first_full {
        Some(j0) => {
            let base = fit_level_hyperparams(coeffs.level(j0), kind)?;
            for j in 0..j0 {
                out.push(LevelHyperParams { level: j, ..base });
            }
            out.push(LevelHyperParams { level: j0, ..base });
            for j in j0 + 1..levels {
                let fit = fit_level_hyperparams(coeffs.level(j), kind)?;
                out.push(LevelHyperParams { level: j, ..fit });
            }
        }
        None => {
            let pooled = &coeffs.as_slice()[1..];
            let base = fit_level_hyperparams(pooled, kind)?;
            for j in 0..levels {
                out.push(LevelHyperParams { level: j, ..base });
            }
        }
    }
    Ok(out)
}
