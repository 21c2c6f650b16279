//! Single-site full-conditional checks at n = 8 with 10^5 draws each.
//!
//! Every check compares the sampler's update against an oracle written here
//! (explicit densities, the dense wavelet matrix, quadrature) and returns a
//! description of the worst statistic on failure.

use super::*;
use dynmix::distributions::RngStream;
use dynmix::gibbs::*;
use dynmix::shrinkage::{LevelHyperParams, SlabFamily};
use dynmix::wavelet::{build_matrix, CoefficientVector, Transform, WaveletFilter};

pub const DRAWS: usize = 100_000;
pub const KS_LIMIT: f64 = 0.01;

pub const Y: [f64; 8] = [-0.8, 0.3, 2.6, 1.9, -1.4, 3.3, 0.1, 2.2];
pub const Z: [bool; 8] = [false, false, true, true, false, true, false, true];

fn params() -> ComponentParams {
    ComponentParams {
        mu: [0.2, 2.1],
        tau2: [0.5, 1.4],
    }
}

fn priors() -> PriorSpec {
    PriorSpec {
        mean_prior_mean: [0.0, 2.0],
        mean_prior_variance: [3.0, 2.0],
        precision_prior_shape: [0.5, 2.0],
        precision_prior_rate: [0.3, 1.0],
    }
}

fn normal_density(x: f64, m: f64, var: f64) -> f64 {
    (-(x - m) * (x - m) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

fn check(ok: bool, what: String, fails: &mut Vec<String>) {
    if !ok {
        fails.push(what);
    }
}

fn finish(fails: Vec<String>) -> Result<(), String> {
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails.join("; "))
    }
}

/// `z_t` against `alpha N(y; mu2, 1/tau2_2) / (alpha N(..2) + (1 - alpha) N(..1))`.
pub fn allocations() -> Result<(), String> {
    let p = params();
    let alpha = [0.1, 0.9, 0.5, 0.02, 0.7, 0.35, 0.999, 0.6];
    let mut rng = RngStream::new(301, 0);
    let mut z = [false; 8];
    let mut hits = [0usize; 8];
    for _ in 0..DRAWS {
        update_allocations(&mut rng, &Y, &p, &alpha, &mut z);
        for t in 0..8 {
            hits[t] += z[t] as usize;
        }
    }
    let mut fails = vec![];
    for t in 0..8 {
        let w2 = alpha[t] * normal_density(Y[t], p.mu[1], 1.0 / p.tau2[1]);
        let w1 = (1.0 - alpha[t]) * normal_density(Y[t], p.mu[0], 1.0 / p.tau2[0]);
        let want = w2 / (w1 + w2);
        check(
            freq_within_3se(hits[t], DRAWS, want),
            format!("z_{t}: {} vs {want}", hits[t] as f64 / DRAWS as f64),
            &mut fails,
        );
    }
    finish(fails)
}

/// `l_t` against `N((M^T theta)_t, 1)` truncated by `z_t`, with `M` the dense matrix.
pub fn latents() -> Result<(), String> {
    let filter = WaveletFilter::coif3();
    let theta = [0.4, -1.1, 0.8, 0.0, 2.0, -0.5, 0.0, 0.3];
    let means = build_matrix(8, &filter).unwrap().transpose_mul_vec(&theta);
    let mut transform = Transform::new(filter, 8).unwrap();
    let mut rng = RngStream::new(302, 0);
    let mut l = [0.0; 8];
    let mut draws = (0..8)
        .map(|_| Vec::with_capacity(DRAWS))
        .collect::<Vec<Vec<f64>>>();
    for _ in 0..DRAWS {
        update_latents(&mut rng, &Z, &theta, &mut transform, &mut l);
        for t in 0..8 {
            draws[t].push(l[t]);
        }
    }
    let mut fails = vec![];
    for t in 0..8 {
        let m = means[t];
        let f = |x: f64| (-0.5 * (x - m) * (x - m)).exp();
        let (lo, hi) = if Z[t] {
            (0.0, m.max(0.0) + 40.0)
        } else {
            (m.min(0.0) - 40.0, 0.0)
        };
        let ks = ks_against_density(&draws[t], &f, &[], lo, hi);
        check(ks < KS_LIMIT, format!("l_{t}: KS {ks}"), &mut fails);
        let wrong_side = draws[t].iter().any(|&x| (x > 0.0) != Z[t]);
        check(
            !wrong_side,
            format!("l_{t}: draw on the wrong side"),
            &mut fails,
        );
    }
    finish(fails)
}

/// `mu_k` (normal) and `tau2_k` (gamma given the `mu_k` just drawn).
pub fn component_params() -> Result<(), String> {
    let pr = priors();
    let tau2_current = [0.7, 1.9];
    let mut rng = RngStream::new(303, 0);
    let mut mu = [Vec::with_capacity(DRAWS), Vec::with_capacity(DRAWS)];
    let mut pivot = [Vec::with_capacity(DRAWS), Vec::with_capacity(DRAWS)];
    let members: [Vec<f64>; 2] = [
        Y.iter()
            .zip(&Z)
            .filter(|(_, z)| !**z)
            .map(|(y, _)| *y)
            .collect(),
        Y.iter()
            .zip(&Z)
            .filter(|(_, z)| **z)
            .map(|(y, _)| *y)
            .collect(),
    ];
    let shape: Vec<f64> = (0..2)
        .map(|k| pr.precision_prior_shape[k] + members[k].len() as f64 / 2.0)
        .collect();
    for _ in 0..DRAWS {
        let p = update_component_params(&mut rng, &Y, &Z, &pr, tau2_current).unwrap();
        for k in 0..2 {
            mu[k].push(p.mu[k]);
            let ss: f64 = members[k]
                .iter()
                .map(|y| (y - p.mu[k]) * (y - p.mu[k]))
                .sum();
            let rate = pr.precision_prior_rate[k] + ss / 2.0;
            // tau2 * rate ~ Gamma(shape, 1) whatever mu was drawn.
            pivot[k].push(p.tau2[k] * rate);
        }
    }
    let mut fails = vec![];
    for k in 0..2 {
        let n_k = members[k].len() as f64;
        let sum: f64 = members[k].iter().sum();
        let prec = 1.0 / pr.mean_prior_variance[k] + tau2_current[k] * n_k;
        let m = (tau2_current[k] * sum + pr.mean_prior_mean[k] / pr.mean_prior_variance[k]) / prec;
        let sd = (1.0 / prec).sqrt();
        let f = |x: f64| normal_density(x, m, sd * sd);
        let ks = ks_against_density(&mu[k], &f, &[], m - 12.0 * sd, m + 12.0 * sd);
        check(ks < KS_LIMIT, format!("mu_{}: KS {ks}", k + 1), &mut fails);
        check(
            within_3se(&mu[k], m),
            format!("mu_{}: mean {}", k + 1, mean(&mu[k])),
            &mut fails,
        );

        let s = shape[k];
        check(
            within_3se(&pivot[k], s),
            format!("tau2_{}: pivot mean {} vs {s}", k + 1, mean(&pivot[k])),
            &mut fails,
        );
        let sq: Vec<f64> = pivot[k].iter().map(|x| (x - s) * (x - s)).collect();
        check(
            within_3se(&sq, s),
            format!("tau2_{}: pivot variance {} vs {s}", k + 1, mean(&sq)),
            &mut fails,
        );
        let g = |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                ((s - 1.0) * x.ln() - x).exp()
            }
        };
        let ks = ks_against_density(&pivot[k], &g, &[], 0.0, s + 60.0);
        check(
            ks < KS_LIMIT,
            format!("tau2_{}: KS {ks}", k + 1),
            &mut fails,
        );
    }
    finish(fails)
}

/// `theta`: flat-prior scaling slot and spike-and-slab detail slots.
pub fn coefficients() -> Result<(), String> {
    let empirical = CoefficientVector::new(vec![0.7, 3.5, -0.4, 1.6, 0.0, -2.2, 0.9, 5.0]).unwrap();
    let mut fails = vec![];
    let families = [
        [
            SlabFamily::Gaussian { variance: 4.0 },
            SlabFamily::Gaussian { variance: 1.0 },
            SlabFamily::Gaussian { variance: 0.3 },
        ],
        [
            SlabFamily::Laplace { scale: 0.3 },
            SlabFamily::Laplace { scale: 1.0 },
            SlabFamily::Laplace { scale: 2.5 },
        ],
    ];
    let pis = [0.6, 0.3, 0.1];
    for (fi, slabs) in families.iter().enumerate() {
        let hyper: Vec<LevelHyperParams> = (0..3)
            .map(|j| LevelHyperParams::new(j, pis[j], slabs[j]).unwrap())
            .collect();
        let mut rng = RngStream::new(304, fi as u64);
        let mut theta = [0.0; 8];
        let mut draws = (0..8)
            .map(|_| Vec::with_capacity(DRAWS))
            .collect::<Vec<Vec<f64>>>();
        for _ in 0..DRAWS {
            update_coefficients(&mut rng, &empirical, &hyper, &mut theta);
            for t in 0..8 {
                draws[t].push(theta[t]);
            }
        }
        let d0 = empirical.scaling();
        let ks = ks_against_density(&draws[0], &|x| phi(x - d0), &[], d0 - 12.0, d0 + 12.0);
        check(
            ks < KS_LIMIT,
            format!("family {fi} c00: KS {ks}"),
            &mut fails,
        );

        #[allow(clippy::needless_range_loop)]
        for t in 1..8usize {
            let j = (usize::BITS - 1 - t.leading_zeros()) as usize;
            let d = empirical.as_slice()[t];
            let pi = pis[j];
            // Oracle slab marginal and slab posterior density (unnormalized).
            let (g, post): (f64, Box<dyn Fn(f64) -> f64>) = match slabs[j] {
                SlabFamily::Gaussian { variance: v } => (
                    normal_density(d, 0.0, 1.0 + v),
                    Box::new(move |x: f64| normal_density(x, 0.0, v) * phi(d - x)),
                ),
                SlabFamily::Laplace { scale: a } => (
                    laplace_marginal_quadrature(d, a),
                    Box::new(move |x: f64| (-a * x.abs()).exp() * phi(d - x)),
                ),
            };
            let p_nonzero = pi * g / ((1.0 - pi) * phi(d) + pi * g);
            let nonzero: Vec<f64> = draws[t].iter().copied().filter(|&x| x != 0.0).collect();
            check(
                freq_within_3se(nonzero.len(), DRAWS, p_nonzero),
                format!(
                    "family {fi} theta_{t}: nonzero {} vs {p_nonzero}",
                    nonzero.len() as f64 / DRAWS as f64
                ),
                &mut fails,
            );
            if nonzero.len() >= 1000 {
                let ks = ks_against_density(&nonzero, &post, &[0.0], d - 15.0, d + 15.0);
                // KS of a sub-sample: scale the limit to its size.
                let limit = KS_LIMIT * (DRAWS as f64 / nonzero.len() as f64).sqrt();
                check(
                    ks < limit,
                    format!("family {fi} theta_{t}: KS {ks} (limit {limit})"),
                    &mut fails,
                );
            }
        }
    }
    finish(fails)
}
