//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use dynmix::shrinkage::{log_marginal_likelihood, FamilyKind, PI_MAX, PI_MIN};

/// Adaptive Simpson on `[a, b]`, refining until each panel agrees to `rel`
/// of its own magnitude (suitable for positive integrands).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, rel, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let both = left + right;
    if depth == 0 || (both - whole).abs() <= 15.0 * rel * both.abs() || (b - a) < 1e-12 {
        return both + (both - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, rel, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, rel, depth - 1)
}

/// Integral over the real line of a function concentrated within `width` of
/// the listed points; the range is split at every point.
pub fn integrate_line<F: Fn(f64) -> f64>(f: &F, points: &[f64], width: f64, rel: f64) -> f64 {
    let mut cuts: Vec<f64> = points.to_vec();
    let lo = points.iter().copied().fold(f64::INFINITY, f64::min) - width;
    let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max) + width;
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).map(|w| integrate(f, w[0], w[1], rel)).sum()
}

pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Phi(x)` by quadrature of the density; the lower tail is integrated
/// directly so it keeps relative accuracy.
pub fn big_phi(x: f64) -> f64 {
    if x >= 0.0 {
        0.5 + integrate(&phi, 0.0, x, 1e-14)
    } else if x < -1.0 {
        integrate(&phi, x - 40.0, x, 1e-14)
    } else {
        0.5 - integrate(&phi, x, 0.0, 1e-14)
    }
}

/// Kolmogorov-Smirnov distance between a sample and a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / m).abs().max(((i + 1) as f64 / m - c).abs())
        })
        .fold(0.0, f64::max)
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// `|mean(x) - target| <= 3 * SE`, with SE from the sample itself.
pub fn within_3se(x: &[f64], target: f64) -> bool {
    let se = (variance(x) / x.len() as f64).sqrt();
    (mean(x) - target).abs() <= 3.0 * se
}

/// Same check for a Bernoulli frequency against probability `p`.
pub fn freq_within_3se(hits: usize, total: usize, p: f64) -> bool {
    let se = (p * (1.0 - p) / total as f64).sqrt();
    (hits as f64 / total as f64 - p).abs() <= 3.0 * se.max(1e-12)
}

/// `g_a(d) = int (a/2) e^{-a|x|} phi(d - x) dx` by quadrature.
pub fn laplace_marginal_quadrature(d: f64, a: f64) -> f64 {
    let f = |x: f64| 0.5 * a * (-a * x.abs()).exp() * phi(d - x);
    integrate_line(&f, &[0.0, d, d - a, d + a], 40.0, 1e-13)
}

/// KS distance between a sample and the distribution with (unnormalized)
/// density `f`, integrating `f` between consecutive order statistics. `kinks`
/// are points where `f` is not smooth; the support is taken as `[lo, hi]`.
pub fn ks_against_density<F: Fn(f64) -> f64>(
    sample: &[f64],
    f: &F,
    kinks: &[f64],
    lo: f64,
    hi: f64,
) -> f64 {
    let piece = |a: f64, b: f64| -> f64 {
        let mut cuts = vec![a, b];
        cuts.extend(kinks.iter().copied().filter(|&k| k > a && k < b));
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .map(|w| integrate(f, w[0], w[1], 1e-10))
            .sum()
    };
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let total = piece(lo, hi);
    let m = s.len() as f64;
    let mut acc = piece(lo, s[0].max(lo));
    let mut worst = 0.0f64;
    for i in 0..s.len() {
        if i > 0 {
            acc += piece(s[i - 1], s[i]);
        }
        let c = acc / total;
        worst = worst
            .max((c - i as f64 / m).abs())
            .max(((i + 1) as f64 / m - c).abs());
    }
    worst
}

/// Type-7 sample quantile, written independently of the library.
pub fn quantile7(values: &[f64], p: f64) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p * (s.len() - 1) as f64;
    let k = pos as usize;
    if k + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[k] * (1.0 - (pos - k as f64)) + s[k + 1] * (pos - k as f64)
}

/// Brute-force HPD: every window of `ceil(mass m)` order statistics.
pub fn brute_hpd(values: &[f64], mass: f64) -> (f64, f64) {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = (mass * s.len() as f64).ceil() as usize;
    let mut best = (s[0], s[k - 1]);
    for i in 0..=s.len() - k {
        if s[i + k - 1] - s[i] < best.1 - best.0 {
            best = (s[i], s[i + k - 1]);
        }
    }
    best
}

/// Plain periodic convolution-and-downsample, written without the pyramid
/// buffers of the library, as an independent oracle.
pub fn naive_dwt(signal: &[f64], h: &[f64]) -> Vec<f64> {
    let l = h.len();
    let g: Vec<f64> = (0..l)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * h[l - 1 - i])
        .collect();
    let mut approx = signal.to_vec();
    let mut details: Vec<Vec<f64>> = Vec::new();
    while approx.len() > 1 {
        let m = approx.len();
        let mut a = vec![0.0; m / 2];
        let mut d = vec![0.0; m / 2];
        for k in 0..m / 2 {
            for i in 0..l {
                let x = approx[(2 * k + i) % m];
                a[k] += h[i] * x;
                d[k] += g[i] * x;
            }
        }
        details.push(d);
        approx = a;
    }
    let mut out = approx;
    for d in details.into_iter().rev() {
        out.extend(d);
    }
    out
}

/// Brute force 50 x 50 grid over (pi, log parameter).
pub fn grid_best(coeffs: &[f64], kind: FamilyKind) -> f64 {
    let (lo, hi) = kind.bounds();
    let mut best = f64::NEG_INFINITY;
    for i in 0..50 {
        let pi = PI_MIN + (PI_MAX - PI_MIN) * i as f64 / 49.0;
        for k in 0..50 {
            let p = (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / 49.0).exp();
            let ll = log_marginal_likelihood(coeffs, pi, kind.slab(p)).unwrap();
            best = best.max(ll);
        }
    }
    best
}

pub mod conditionals;
