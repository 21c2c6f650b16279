//! Weight curves, synthetic series and the Monte Carlo study driver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{bernoulli, standard_normal, RngStream};
use crate::gibbs::{default_priors_from_data, run_chain_with_rng, ChainConfig};
use crate::inference::{
    averaged_intervals, hpd_interval, monte_carlo_summary, summarize, IntervalMode,
    ReplicateSummary, MIN_HPD_DRAWS,
};
use crate::wavelet::dyadic_levels;
use crate::{Error, Result};

/// Breakpoints shared by the blocks and bumps test functions.
pub const DJ_LOCATIONS: [f64; 11] = [
    0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81,
];
pub const BLOCKS_HEIGHTS: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
pub const BUMPS_HEIGHTS: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
pub const BUMPS_WIDTHS: [f64; 11] = [
    0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005,
];

/// Default range blocks are mapped affinely onto.
pub const BLOCKS_RANGE: (f64, f64) = (0.05, 0.95);
/// Default maximum of the rescaled bumps.
pub const BUMPS_PEAK: f64 = 0.9;
/// Default fraction of the peak below which rescaled bumps are set to exactly zero.
pub const BUMPS_ZERO_FLOOR: f64 = 1e-3;

/// `(1 + sign x) / 2` with `sign 0 = 0`.
fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Unscaled blocks function.
pub fn blocks_raw(t: f64) -> f64 {
    DJ_LOCATIONS
        .iter()
        .zip(BLOCKS_HEIGHTS)
        .map(|(&loc, h)| h * step(t - loc))
        .sum()
}

/// Unscaled bumps function.
pub fn bumps_raw(t: f64) -> f64 {
    DJ_LOCATIONS
        .iter()
        .zip(BUMPS_HEIGHTS)
        .zip(BUMPS_WIDTHS)
        .map(|((&loc, h), w)| h * (1.0 + ((t - loc) / w).abs()).powi(-4))
        .sum()
}

/// True dynamic weight curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightCurve {
    /// `0.4 cos(2 pi (t/n + pi)) + 0.5`.
    Sinusoidal,
    /// Blocks mapped affinely onto `[low, high]`.
    Blocks {
        low: f64,
        high: f64,
    },
    /// Bumps scaled to maximum `peak`; values under `zero_floor * peak` become 0.
    Bumps {
        peak: f64,
        zero_floor: f64,
    },
    Constant {
        level: f64,
    },
    Tabulated {
        values: Vec<f64>,
    },
}

impl WeightCurve {
    /// Blocks on the default range.
    pub fn blocks() -> Self {
        WeightCurve::Blocks {
            low: BLOCKS_RANGE.0,
            high: BLOCKS_RANGE.1,
        }
    }

    /// Bumps with the default peak and zero floor.
    pub fn bumps() -> Self {
        WeightCurve::Bumps {
            peak: BUMPS_PEAK,
            zero_floor: BUMPS_ZERO_FLOOR,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightCurve::Sinusoidal => "sinusoidal",
            WeightCurve::Blocks { .. } => "blocks",
            WeightCurve::Bumps { .. } => "bumps",
            WeightCurve::Constant { .. } => "constant",
            WeightCurve::Tabulated { .. } => "tabulated",
        }
    }

    /// Parses `sinusoidal`, `blocks`, `bumps` or `constant:<level>`.
    pub fn parse(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "sinusoidal" | "sine" => Ok(WeightCurve::Sinusoidal),
            "blocks" => Ok(WeightCurve::blocks()),
            "bumps" => Ok(WeightCurve::bumps()),
            other => {
                if let Some(level) = other.strip_prefix("constant:") {
                    let level: f64 = level
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad constant level '{level}'")))?;
                    Ok(WeightCurve::Constant { level })
                } else {
                    Err(Error::invalid(format!(
                        "unknown weight curve '{s}' (sinusoidal, blocks, bumps, constant:<p>)"
                    )))
                }
            }
        }
    }
}

/// Evaluates `curve` on the grid `t/n`, `t = 1..=n`.
pub fn weight_curve(curve: &WeightCurve, n: usize) -> Result<Vec<f64>> {
    dyadic_levels(n)?;
    let grid = (1..=n).map(|t| t as f64 / n as f64);
    let values: Vec<f64> = match curve {
        WeightCurve::Sinusoidal => grid
            .map(|u| 0.4 * (2.0 * std::f64::consts::PI * (u + std::f64::consts::PI)).cos() + 0.5)
            .collect(),
        &WeightCurve::Blocks { low: a, high: b } => {
            if !(0.0 <= a && a <= b && b <= 1.0) {
                return Err(Error::invalid(format!(
                    "blocks range [{a}, {b}] is not inside [0, 1]"
                )));
            }
            let raw: Vec<f64> = grid.map(blocks_raw).collect();
            let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                raw.iter()
                    .map(|v| a + (b - a) * (v - lo) / (hi - lo))
                    .collect()
            } else {
                vec![0.5 * (a + b); n]
            }
        }
        &WeightCurve::Bumps { peak, zero_floor } => {
            if !(0.0 < peak && peak <= 1.0) || !(0.0..1.0).contains(&zero_floor) {
                return Err(Error::invalid(format!(
                    "bad bumps scaling (peak {peak}, floor {zero_floor})"
                )));
            }
            let raw: Vec<f64> = grid.map(bumps_raw).collect();
            let hi = raw.iter().copied().fold(0.0, f64::max);
            raw.iter()
                .map(|v| {
                    let scaled = peak * v / hi;
                    if scaled < zero_floor * peak {
                        0.0
                    } else {
                        scaled
                    }
                })
                .collect()
        }
        WeightCurve::Constant { level } => {
            if !(0.0..=1.0).contains(level) {
                return Err(Error::invalid(format!(
                    "constant weight {level} outside [0, 1]"
                )));
            }
            vec![*level; n]
        }
        WeightCurve::Tabulated { values } => {
            if values.len() != n {
                return Err(Error::invalid(format!(
                    "tabulated curve has {} values, expected {n}",
                    values.len()
                )));
            }
            values.clone()
        }
    };
    Ok(values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// One synthetic series and its true allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub y: Vec<f64>,
    pub z: Vec<bool>,
}

/// Draws `z_t ~ Bern(alpha_t)` then `y_t` from the selected component.
/// `tau2` are precisions.
pub fn generate_series(
    rng: &mut RngStream,
    alpha: &[f64],
    mu: [f64; 2],
    tau2: [f64; 2],
) -> Result<Series> {
    if tau2.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::invalid("component precisions must be positive"));
    }
    if let Some(a) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::invalid(format!("weight {a} outside [0, 1]")));
    }
    let sd = [1.0 / tau2[0].sqrt(), 1.0 / tau2[1].sqrt()];
    let mut y = Vec::with_capacity(alpha.len());
    let mut z = Vec::with_capacity(alpha.len());
    for &a in alpha {
        let zt = bernoulli(rng, a);
        let k = usize::from(zt);
        y.push(mu[k] + sd[k] * standard_normal(rng));
        z.push(zt);
    }
    Ok(Series { y, z })
}

/// A Monte Carlo design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub curve: WeightCurve,
    pub n: usize,
    pub mu: [f64; 2],
    /// Precisions.
    pub tau2: [f64; 2],
    pub replicates: usize,
    pub chain: ChainConfig,
    #[serde(default = "default_mass")]
    pub hpd_mass: f64,
    #[serde(default)]
    pub interval_mode: IntervalMode,
}

fn default_mass() -> f64 {
    crate::inference::DEFAULT_MASS
}

impl ScenarioConfig {
    /// Component settings of the simulation design: `mu = (0, 2)`, `tau2 = (4, 4)`.
    pub fn standard(curve: WeightCurve, n: usize, replicates: usize, chain: ChainConfig) -> Self {
        ScenarioConfig {
            curve,
            n,
            mu: [0.0, 2.0],
            tau2: [4.0, 4.0],
            replicates,
            chain,
            hpd_mass: default_mass(),
            interval_mode: IntervalMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        dyadic_levels(self.n)?;
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be positive"));
        }
        if !(self.mu[0] < self.mu[1]) {
            return Err(Error::invalid("scenario requires mu1 < mu2"));
        }
        if self.tau2.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::invalid("precisions must be positive"));
        }
        self.chain.validate()?;
        if let WeightCurve::Tabulated { values } = &self.curve {
            if values.len() != self.n {
                return Err(Error::invalid("tabulated curve length differs from n"));
            }
        }
        Ok(())
    }
}

/// Result of one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    /// Medians of `mu1, tau2_1, mu2, tau2_2`.
    pub estimates: [f64; 4],
    /// Chain HPD intervals of the same parameters.
    pub chain_intervals: [(f64, f64); 4],
    pub alpha_hat: Vec<f64>,
}

/// Pointwise band across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    pub truth: f64,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub truth: Vec<f64>,
    pub replicates: Vec<ReplicateResult>,
    pub failures: Vec<(usize, String)>,
    /// Per parameter, in `mu1, tau2_1, mu2, tau2_2` order.
    pub summary: Vec<ReplicateSummary>,
    pub alpha_band: Vec<BandPoint>,
    /// How `summary` and `alpha_band` intervals were formed.
    pub interval_method: String,
}

/// Fits one synthetic replicate; replicate `r` uses stream `r` of the seed for
/// both data generation and the chain.
pub fn run_replicate(
    scenario: &ScenarioConfig,
    truth: &[f64],
    r: usize,
) -> Result<ReplicateResult> {
    let mut rng = RngStream::new(scenario.chain.seed, r as u64);
    let series = generate_series(&mut rng, truth, scenario.mu, scenario.tau2)?;
    let priors = default_priors_from_data(&series.y)?;
    let chains = run_chain_with_rng(&series.y, &scenario.chain, &priors, rng)?;
    let summary = summarize(&chains, scenario.hpd_mass);
    let (estimates, chain_intervals, alpha_hat) = match summary {
        Ok(s) => {
            let sc = s.scalars();
            (
                sc.map(|e| e.estimate),
                sc.map(|e| (e.lower, e.upper)),
                s.alpha.iter().map(|e| e.estimate).collect(),
            )
        }
        // Too few draws for an HPD: keep medians, intervals collapse to them.
        Err(Error::NotEnoughDraws { .. }) => {
            let p = crate::inference::point_estimates(&chains)?;
            let sc = p.scalars();
            (sc, sc.map(|v| (v, v)), p.alpha)
        }
        Err(e) => return Err(e),
    };
    Ok(ReplicateResult {
        replicate: r,
        estimates,
        chain_intervals,
        alpha_hat,
    })
}

fn range_summary(rows: &[Vec<f64>]) -> Vec<ReplicateSummary> {
    let width = rows[0].len();
    (0..width)
        .map(|c| {
            let col = rows.iter().map(|r| r[c]);
            ReplicateSummary {
                mean: col.clone().sum::<f64>() / rows.len() as f64,
                lower: col.clone().fold(f64::INFINITY, f64::min),
                upper: col.fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

/// Runs every replicate (in parallel) and aggregates.
///
/// The result depends only on the scenario: replicate streams are fixed and
/// results are collected in replicate order.
pub fn run_monte_carlo(scenario: &ScenarioConfig) -> Result<StudyResult> {
    scenario.validate()?;
    let truth = weight_curve(&scenario.curve, scenario.n)?;
    let outcomes: Vec<Result<ReplicateResult>> = (0..scenario.replicates)
        .into_par_iter()
        .map(|r| run_replicate(scenario, &truth, r))
        .collect();

    let mut replicates = Vec::new();
    let mut failures = Vec::new();
    for (r, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(rep) => replicates.push(rep),
            Err(e) => failures.push((r, e.to_string())),
        }
    }
    let total = scenario.replicates;
    if failures.len() * 20 > total || replicates.is_empty() {
        return Err(Error::StudyAborted {
            failed: failures.len(),
            total,
            first: failures[0].1.clone(),
        });
    }

    let rows: Vec<Vec<f64>> = replicates.iter().map(|r| r.estimates.to_vec()).collect();
    let alpha_rows: Vec<Vec<f64>> = replicates.iter().map(|r| r.alpha_hat.clone()).collect();
    let enough = rows.len() >= MIN_HPD_DRAWS;
    let (summary, alpha_summary, interval_method) = match (scenario.interval_mode, enough) {
        (_, false) => (
            range_summary(&rows),
            range_summary(&alpha_rows),
            format!("min-max range (fewer than {MIN_HPD_DRAWS} replicates)"),
        ),
        (IntervalMode::ReplicateSet, true) => (
            monte_carlo_summary(&rows, scenario.hpd_mass)?,
            monte_carlo_summary(&alpha_rows, scenario.hpd_mass)?,
            "replicate-set HPD".to_string(),
        ),
        (IntervalMode::AveragedChain, true) => {
            let intervals: Vec<Vec<(f64, f64)>> = replicates
                .iter()
                .map(|r| r.chain_intervals.to_vec())
                .collect();
            (
                averaged_intervals(&rows, &intervals)?,
                // Pointwise alpha bands always use the replicate set.
                monte_carlo_summary(&alpha_rows, scenario.hpd_mass)?,
                "averaged chain HPD (alpha band: replicate-set HPD)".to_string(),
            )
        }
    };
    let alpha_band = truth
        .iter()
        .zip(&alpha_summary)
        .map(|(&t, s)| BandPoint {
            truth: t,
            mean: s.mean,
            lower: s.lower,
            upper: s.upper,
        })
        .collect();
    Ok(StudyResult {
        truth,
        replicates,
        failures,
        summary,
        alpha_band,
        interval_method,
    })
}

/// Pointwise HPD coverage helper: fraction of `t` whose band contains the truth.
pub fn band_coverage(band: &[BandPoint]) -> f64 {
    let hit = band
        .iter()
        .filter(|b| b.lower <= b.truth && b.truth <= b.upper)
        .count();
    hit as f64 / band.len() as f64
}

/// HPD of replicate values at one time point, exposed for external checks.
pub fn pointwise_hpd(values: &[f64], mass: f64) -> Result<(f64, f64)> {
    hpd_interval(values, mass)
}
