//! Posterior summaries: medians, HPD intervals, regimes and change points.

use serde::{Deserialize, Serialize};

use crate::gibbs::PosteriorChains;
use crate::{Error, Result};

/// Fewest draws [`hpd_interval`] accepts.
pub const MIN_HPD_DRAWS: usize = 20;
/// Default credible mass.
pub const DEFAULT_MASS: f64 = 0.95;

/// Names of the scalar component parameters, in chain/table order.
pub const PARAMETER_NAMES: [&str; 4] = ["mu1", "tau2_1", "mu2", "tau2_2"];

/// Sample median; even lengths average the two central order statistics.
pub fn median(draws: &[f64]) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::NotEnoughDraws { have: 0, need: 1 });
    }
    let mut s = draws.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len();
    Ok(if m % 2 == 1 {
        s[m / 2]
    } else {
        0.5 * (s[m / 2 - 1] + s[m / 2])
    })
}

/// Shortest interval holding `ceil(mass * m)` of the sorted draws.
///
/// Ties go to the lowest window.
pub fn hpd_interval(draws: &[f64], mass: f64) -> Result<(f64, f64)> {
    if draws.len() < MIN_HPD_DRAWS {
        return Err(Error::NotEnoughDraws {
            have: draws.len(),
            need: MIN_HPD_DRAWS,
        });
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::invalid(format!(
            "HPD mass must lie in (0, 1), got {mass}"
        )));
    }
    let mut s = draws.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(hpd_sorted(&s, mass))
}

fn hpd_sorted(s: &[f64], mass: f64) -> (f64, f64) {
    let m = s.len();
    let count = ((mass * m as f64).ceil() as usize).clamp(1, m);
    let (mut lo, mut width) = (0, f64::INFINITY);
    for i in 0..=m - count {
        let w = s[i + count - 1] - s[i];
        if w < width {
            width = w;
            lo = i;
        }
    }
    (s[lo], s[lo + count - 1])
}

/// Posterior medians of the component parameters and of every `alpha_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEstimates {
    pub mu1: f64,
    pub tau2_1: f64,
    pub mu2: f64,
    pub tau2_2: f64,
    pub alpha: Vec<f64>,
}

impl PointEstimates {
    pub fn scalars(&self) -> [f64; 4] {
        [self.mu1, self.tau2_1, self.mu2, self.tau2_2]
    }
}

fn scalar_chains(chains: &PosteriorChains) -> [&[f64]; 4] {
    [
        &chains.mu[0],
        &chains.tau2[0],
        &chains.mu[1],
        &chains.tau2[1],
    ]
}

pub fn point_estimates(chains: &PosteriorChains) -> Result<PointEstimates> {
    if chains.is_empty() {
        return Err(Error::NotEnoughDraws { have: 0, need: 1 });
    }
    let [mu1, tau2_1, mu2, tau2_2] = scalar_chains(chains).map(|c| median(c).expect("non-empty"));
    let alpha = (0..chains.n)
        .map(|t| median(&chains.alpha_at(t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointEstimates {
        mu1,
        tau2_1,
        mu2,
        tau2_2,
        alpha,
    })
}

/// Regime labels (1 when `alpha_hat > 0.5`) and 1-based change points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regimes {
    pub labels: Vec<u8>,
    pub change_points: Vec<usize>,
}

pub fn classify_regimes(alpha_hat: &[f64]) -> Result<Regimes> {
    if let Some(a) = alpha_hat.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::invalid(format!("weight {a} outside [0, 1]")));
    }
    let labels: Vec<u8> = alpha_hat.iter().map(|&a| u8::from(a > 0.5)).collect();
    let change_points = labels
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(i, _)| i + 2)
        .collect();
    Ok(Regimes {
        labels,
        change_points,
    })
}

/// A point estimate with its credible interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Everything reported for one fitted series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub retained_draws: usize,
    pub hpd_mass: f64,
    pub mu1: Estimate,
    pub tau2_1: Estimate,
    pub mu2: Estimate,
    pub tau2_2: Estimate,
    pub alpha: Vec<Estimate>,
    pub regimes: Regimes,
}

impl FitSummary {
    pub fn scalars(&self) -> [Estimate; 4] {
        [self.mu1, self.tau2_1, self.mu2, self.tau2_2]
    }
}

pub fn summarize(chains: &PosteriorChains, mass: f64) -> Result<FitSummary> {
    let point = point_estimates(chains)?;
    let est = |draws: &[f64], center: f64| -> Result<Estimate> {
        let (lower, upper) = hpd_interval(draws, mass)?;
        Ok(Estimate {
            estimate: center,
            lower,
            upper,
        })
    };
    let scal = scalar_chains(chains);
    let alpha = (0..chains.n)
        .map(|t| est(&chains.alpha_at(t), point.alpha[t]))
        .collect::<Result<Vec<_>>>()?;
    Ok(FitSummary {
        retained_draws: chains.len(),
        hpd_mass: mass,
        mu1: est(scal[0], point.mu1)?,
        tau2_1: est(scal[1], point.tau2_1)?,
        mu2: est(scal[2], point.mu2)?,
        tau2_2: est(scal[3], point.tau2_2)?,
        regimes: classify_regimes(&point.alpha)?,
        alpha,
    })
}

/// How the across-replicate intervals of a Monte Carlo table are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMode {
    /// HPD of the set of replicate point estimates.
    #[default]
    ReplicateSet,
    /// Average of each replicate's own chain HPD endpoints.
    AveragedChain,
}

impl std::str::FromStr for IntervalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replicate-set" => Ok(IntervalMode::ReplicateSet),
            "averaged-chain" => Ok(IntervalMode::AveragedChain),
            other => Err(Error::invalid(format!("unknown interval mode '{other}'"))),
        }
    }
}

/// Mean of replicate point estimates and the interval around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Per-column mean and HPD across replicates. Rows are replicates.
pub fn monte_carlo_summary(rows: &[Vec<f64>], mass: f64) -> Result<Vec<ReplicateSummary>> {
    if rows.len() < MIN_HPD_DRAWS {
        return Err(Error::NotEnoughDraws {
            have: rows.len(),
            need: MIN_HPD_DRAWS,
        });
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::invalid("replicate rows have different widths"));
    }
    (0..width)
        .map(|c| {
            let col: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            let (lower, upper) = hpd_interval(&col, mass)?;
            Ok(ReplicateSummary {
                mean: col.iter().sum::<f64>() / col.len() as f64,
                lower,
                upper,
            })
        })
        .collect()
}

/// Column means of replicate chain-HPD endpoints; `intervals[r][c] = (lo, hi)`.
pub fn averaged_intervals(
    rows: &[Vec<f64>],
    intervals: &[Vec<(f64, f64)>],
) -> Result<Vec<ReplicateSummary>> {
    if rows.is_empty() || rows.len() != intervals.len() {
        return Err(Error::invalid("need one interval row per replicate"));
    }
    let width = rows[0].len();
    let r = rows.len() as f64;
    (0..width)
        .map(|c| {
            Ok(ReplicateSummary {
                mean: rows.iter().map(|row| row[c]).sum::<f64>() / r,
                lower: intervals.iter().map(|row| row[c].0).sum::<f64>() / r,
                upper: intervals.iter().map(|row| row[c].1).sum::<f64>() / r,
            })
        })
        .collect()
}

/// `0.00 (-0.04;0.06)`-style cell.
pub fn format_table_cell(s: &ReplicateSummary, decimals: usize) -> String {
    format!(
        "{:.*} ({:.*};{:.*})",
        decimals, s.mean, decimals, s.lower, decimals, s.upper
    )
}
