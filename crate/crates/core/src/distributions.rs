//! Random streams, normal special functions and the sampling kernels used by
//! every stochastic step of the sampler.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::{Error, Result};

/// `ln(sqrt(2 pi))`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this point `ln Phi` switches from `erfc` to the Mills-ratio continued fraction.
const LOG_CDF_TAIL: f64 = -8.0;

/// One-sided truncated normals whose standardized truncation point is at or
/// below this value use plain rejection; beyond it the exponential proposal.
pub const NAIVE_REJECTION_CUTOFF: f64 = 0.4;

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Streams sharing a seed but differing in `stream_id` are disjoint ChaCha
/// streams, so Monte Carlo replicate `r` can simply use `stream_id = r`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A new stream with the same seed and a different id.
    pub fn derive(&self, stream_id: u64) -> Self {
        RngStream::new(self.seed, stream_id)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Numerically stable `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Numerically stable `ln(sum e^x_i)`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

#[inline]
pub fn ln_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Log density of `N(mean, variance)` at `x`.
#[inline]
pub fn ln_normal_density(x: f64, mean: f64, variance: f64) -> f64 {
    let r = x - mean;
    -0.5 * r * r / variance - 0.5 * variance.ln() - LN_SQRT_2PI
}

/// Standard normal CDF `Phi(x)`.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(x)` without cancellation.
#[inline]
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Mills ratio `(1 - Phi(t)) / phi(t)` for `t >= 8` by continued fraction.
fn mills_ratio_tail(t: f64) -> f64 {
    let mut f = t;
    for k in (1..=40).rev() {
        f = t + k as f64 / f;
    }
    1.0 / f
}

/// `ln Phi(x)`, accurate in both tails.
/// Mills ratio `(1 - Phi(t)) / phi(t)`. Overflows to infinity below about -37.5.
pub fn mills_ratio(t: f64) -> f64 {
    if t >= -LOG_CDF_TAIL {
        mills_ratio_tail(t)
    } else {
        normal_sf(t) / normal_pdf(t)
    }
}

/// `ln` of [`mills_ratio`], finite everywhere.
pub fn ln_mills_ratio(t: f64) -> f64 {
    if t >= -LOG_CDF_TAIL {
        mills_ratio_tail(t).ln()
    } else {
        log_normal_sf(t) + 0.5 * t * t + LN_SQRT_2PI
    }
}

pub fn log_normal_cdf(x: f64) -> f64 {
    if x > 5.0 {
        (-normal_sf(x)).ln_1p()
    } else if x >= LOG_CDF_TAIL {
        normal_cdf(x).ln()
    } else {
        ln_normal_pdf(x) + mills_ratio_tail(-x).ln()
    }
}

/// `ln(1 - Phi(x))`.
#[inline]
pub fn log_normal_sf(x: f64) -> f64 {
    log_normal_cdf(-x)
}

#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, sd: f64) -> Result<f64> {
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::invalid(format!(
            "normal sd must be positive, got {sd}"
        )));
    }
    Ok(mean + sd * standard_normal(rng))
}

/// Gamma draw in shape/rate parameterization (mean `shape / rate`).
///
/// Shapes below one go through the `U^(1/shape)` boost inside `rand_distr`.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0) || !shape.is_finite() || !rate.is_finite() {
        return Err(Error::invalid(format!(
            "gamma needs positive shape and rate, got ({shape}, {rate})"
        )));
    }
    let dist = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::invalid(e.to_string()))?;
    // Tiny shapes can underflow to exactly zero; the support is (0, inf).
    Ok(dist.sample(rng).max(f64::MIN_POSITIVE))
}

pub fn sample_bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "bernoulli p must lie in [0, 1], got {p}"
        )));
    }
    Ok(bernoulli(rng, p))
}

#[inline]
pub(crate) fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

/// Which half-line a one-sided truncated normal keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(0, inf)`, used when `z_t = 1`.
    Positive,
    /// `(-inf, 0)`, used when `z_t = 0`.
    Negative,
}

/// `N(mean, 1)` restricted to the half-line named by `side`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, side: Side) -> f64 {
    match side {
        Side::Positive => positive_part(rng, mean),
        Side::Negative => -positive_part(rng, -mean),
    }
}

/// Draw from `N(mean, 1)` conditioned on being positive.
fn positive_part<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    let a = -mean;
    if a <= NAIVE_REJECTION_CUTOFF {
        loop {
            let x = mean + standard_normal(rng);
            if x > 0.0 {
                return x;
            }
        }
    }
    // Exponential proposal with the optimal rate (Robert, 1995). The draw is
    // returned as the excess over the truncation point, which equals x itself.
    let lambda = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let e: f64 = Exp1.sample(rng);
        let excess = e / lambda;
        let z = a + excess;
        let accept = (-0.5 * (z - lambda) * (z - lambda)).exp();
        if excess > 0.0 && rng.random::<f64>() < accept {
            return excess;
        }
    }
}

/// Standard normal restricted to `(a, inf)`.
fn standard_tail<R: Rng + ?Sized>(rng: &mut R, a: f64) -> f64 {
    a + positive_part(rng, -a)
}

/// `N(location, scale^2)` truncated to `(lower, upper)`; either bound may be infinite.
pub fn sample_general_truncated_normal<R: Rng + ?Sized>(
    rng: &mut R,
    location: f64,
    scale: f64,
    lower: f64,
    upper: f64,
) -> Result<f64> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::invalid(format!(
            "scale must be positive, got {scale}"
        )));
    }
    if !(lower < upper) {
        return Err(Error::invalid(format!(
            "empty truncation interval ({lower}, {upper})"
        )));
    }
    let a = (lower - location) / scale;
    let b = (upper - location) / scale;
    let z = standard_two_sided(rng, a, b);
    Ok((location + scale * z).clamp(lower, upper))
}

fn standard_two_sided<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (false, false) => return standard_normal(rng),
        (true, false) => return standard_tail(rng, a),
        (false, true) => return -standard_tail(rng, -b),
        (true, true) => {}
    }
    if b <= 0.0 {
        return -standard_two_sided(rng, -b, -a);
    }
    if a < 0.0 {
        // Interval straddles the mode.
        let mass = normal_cdf(b) - normal_cdf(a);
        if mass >= 0.3 {
            loop {
                let z = standard_normal(rng);
                if z > a && z < b {
                    return z;
                }
            }
        }
        return uniform_rejection(rng, a, b, 0.0);
    }
    // 0 <= a < b: compare the tail mass kept below b.
    let kept = 1.0 - (log_normal_sf(b) - log_normal_sf(a)).exp();
    if a <= NAIVE_REJECTION_CUTOFF && normal_cdf(b) - normal_cdf(a) >= 0.3 {
        loop {
            let z = standard_normal(rng);
            if z > a && z < b {
                return z;
            }
        }
    }
    if kept >= 0.3 {
        loop {
            let z = standard_tail(rng, a);
            if z < b {
                return z;
            }
        }
    }
    uniform_rejection(rng, a, b, a)
}

/// Uniform proposal on `(a, b)`, accepted with `exp((m^2 - z^2) / 2)` where `m`
/// is the point of the interval closest to zero.
fn uniform_rejection<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64, m: f64) -> f64 {
    loop {
        let z = a + (b - a) * rng.random::<f64>();
        if z <= a || z >= b {
            continue;
        }
        if rng.random::<f64>() < (0.5 * (m * m - z * z)).exp() {
            return z;
        }
    }
}

/// Mean of `N(mean, 1)` truncated to `(0, inf)`.
pub fn truncated_positive_mean(mean: f64) -> f64 {
    // mean + phi(mean) / Phi(mean), with the ratio taken in log space.
    mean + (ln_normal_pdf(mean) - log_normal_cdf(mean)).exp()
}
