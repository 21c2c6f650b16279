//! Periodic orthonormal discrete wavelet transform.
//!
//! The forward transform runs Mallat's pyramid all the way down to a single
//! scaling coefficient (coarsest level `j0 = 0`). Coefficients are stored as
//!
//! ```text
//! [c00, d00, d10, d11, d20, ..., d2_3, ..., d(J-1)_(2^(J-1)-1)]
//! ```
//!
//! so that the level-`j` details occupy the 0-based slice `2^j .. 2^(j+1)`.
//!
//! Phase convention: one analysis step computes
//! `a[k] = sum_i h[i] x[(2k + i) mod m]` and `d[k] = sum_i g[i] x[(2k + i) mod m]`
//! with the quadrature mirror `g[i] = (-1)^i h[L-1-i]`. The synthesis step is the
//! exact transpose.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest size accepted by [`build_matrix`].
pub const MAX_MATRIX_SIZE: usize = 1024;

const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

const DB2: [f64; 4] = [
    0.48296291314453416,
    0.8365163037378079,
    0.2241438680420134,
    -0.12940952255126037,
];

const DB4: [f64; 8] = [
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];

// Coiflet with six vanishing moments (18 taps).
const COIF3: [f64; 18] = [
    -0.003793512864380802,
    0.007782596425672746,
    0.023452696142077168,
    -0.06577191128146936,
    -0.06112339000297255,
    0.40517690240911824,
    0.7937772226260872,
    0.42848347637737,
    -0.07179982161915484,
    -0.08230192710629983,
    0.03455502757329774,
    0.015880544863669452,
    -0.009007976136730624,
    -0.0025745176881367972,
    0.0011175187708306303,
    0.0004662169598204029,
    -7.0983302506379e-05,
    -3.459977319727278e-05,
];

/// Names accepted by [`WaveletFilter::by_name`].
pub const FILTER_NAMES: [&str; 4] = ["coif3", "haar", "db2", "db4"];

/// An orthonormal lowpass filter together with its derived highpass mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    name: &'static str,
    lowpass: &'static [f64],
    highpass: Vec<f64>,
    vanishing_moments: u32,
}

impl WaveletFilter {
    fn from_static(name: &'static str, lowpass: &'static [f64], vanishing_moments: u32) -> Self {
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[len - 1 - i]
            })
            .collect();
        WaveletFilter {
            name,
            lowpass,
            highpass,
            vanishing_moments,
        }
    }

    /// Coiflet with six vanishing moments, the default basis.
    pub fn coif3() -> Self {
        Self::from_static("coif3", &COIF3, 6)
    }

    pub fn haar() -> Self {
        Self::from_static("haar", &HAAR, 1)
    }

    pub fn db2() -> Self {
        Self::from_static("db2", &DB2, 2)
    }

    pub fn db4() -> Self {
        Self::from_static("db4", &DB4, 4)
    }

    /// Looks a bundled filter up by name and validates it.
    pub fn by_name(name: &str) -> Result<Self> {
        let filter = match name.to_ascii_lowercase().as_str() {
            "coif3" | "coif6" | "coiflet6" => Self::coif3(),
            "haar" | "db1" => Self::haar(),
            "db2" => Self::db2(),
            "db4" => Self::db4(),
            other => {
                return Err(Error::invalid(format!(
                    "unknown wavelet filter '{other}' (known: {})",
                    FILTER_NAMES.join(", ")
                )))
            }
        };
        filter.validate()?;
        Ok(filter)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn lowpass(&self) -> &[f64] {
        self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn vanishing_moments(&self) -> u32 {
        self.vanishing_moments
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Checks unit DC gain, unit energy and double-shift orthogonality.
    pub fn validate(&self) -> Result<()> {
        let h = self.lowpass;
        if h.len() < 2 || !h.len().is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "filter {} has odd or too short length {}",
                self.name,
                h.len()
            )));
        }
        let sum: f64 = h.iter().sum();
        if (sum - std::f64::consts::SQRT_2).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "filter {}: coefficient sum {sum} != sqrt(2)",
                self.name
            )));
        }
        let energy: f64 = h.iter().map(|x| x * x).sum();
        if (energy - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "filter {}: energy {energy} != 1",
                self.name
            )));
        }
        for shift in (2..h.len()).step_by(2) {
            let dot: f64 = h.iter().zip(&h[shift..]).map(|(a, b)| a * b).sum();
            if dot.abs() > 1e-10 {
                return Err(Error::invalid(format!(
                    "filter {}: shift-{shift} autocorrelation {dot} != 0",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

impl Default for WaveletFilter {
    fn default() -> Self {
        Self::coif3()
    }
}

impl Serialize for WaveletFilter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name)
    }
}

impl<'de> Deserialize<'de> for WaveletFilter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        WaveletFilter::by_name(&name).map_err(serde::de::Error::custom)
    }
}

/// Returns `J` with `n = 2^J`, or an error when `n` is not a power of two.
pub fn dyadic_levels(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

/// Wavelet-domain vector `(c00, d00, d1, ..., d(J-1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<f64>,
    levels: usize,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let levels = dyadic_levels(values.len())?;
        Ok(CoefficientVector { values, levels })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of detail levels `J`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn scaling(&self) -> f64 {
        self.values[0]
    }

    /// Detail coefficients `d_j`.
    ///
    /// # Panics
    /// If `j >= J`.
    pub fn level(&self, j: usize) -> &[f64] {
        assert!(j < self.levels, "level {j} out of range");
        &self.values[1 << j..2 << j]
    }

    pub fn level_mut(&mut self, j: usize) -> &mut [f64] {
        assert!(j < self.levels, "level {j} out of range");
        &mut self.values[1 << j..2 << j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

/// 1-based positions `[2^j + 1, 2^(j+1)]` holding the level-`j` details.
pub fn level_range(j: usize, levels: usize) -> Result<RangeInclusive<usize>> {
    if j >= levels {
        return Err(Error::LevelOutOfRange { level: j, levels });
    }
    Ok((1 << j) + 1..=(2 << j))
}

/// Reusable pyramid transform for a fixed length.
///
/// Keeps its scratch buffers so repeated forward/inverse passes inside the
/// sampler do not allocate.
#[derive(Debug, Clone)]
pub struct Transform {
    filter: WaveletFilter,
    n: usize,
    work: Vec<f64>,
    tmp: Vec<f64>,
}

impl Transform {
    pub fn new(filter: WaveletFilter, n: usize) -> Result<Self> {
        dyadic_levels(n)?;
        if n < 2 {
            return Err(Error::TooShort { len: n, min: 2 });
        }
        Ok(Transform {
            filter,
            n,
            work: vec![0.0; n],
            tmp: vec![0.0; n],
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn filter(&self) -> &WaveletFilter {
        &self.filter
    }

    /// Writes `W * signal` into `out`.
    pub fn forward_into(&mut self, signal: &[f64], out: &mut [f64]) {
        assert_eq!(signal.len(), self.n, "signal length mismatch");
        assert_eq!(out.len(), self.n, "output length mismatch");
        let h = self.filter.lowpass;
        let g = &self.filter.highpass;
        self.work.copy_from_slice(signal);
        let mut len = self.n;
        while len > 1 {
            let half = len / 2;
            for k in 0..half {
                let mut a = 0.0;
                let mut d = 0.0;
                let mut idx = 2 * k;
                for (hi, gi) in h.iter().zip(g) {
                    if idx >= len {
                        idx %= len;
                    }
                    let x = self.work[idx];
                    a += hi * x;
                    d += gi * x;
                    idx += 1;
                }
                self.tmp[k] = a;
                out[half + k] = d;
            }
            self.work[..half].copy_from_slice(&self.tmp[..half]);
            len = half;
        }
        out[0] = self.work[0];
    }

    /// Writes `W^T * coeffs` into `out`.
    pub fn inverse_into(&mut self, coeffs: &[f64], out: &mut [f64]) {
        assert_eq!(coeffs.len(), self.n, "coefficient length mismatch");
        assert_eq!(out.len(), self.n, "output length mismatch");
        let h = self.filter.lowpass;
        let g = &self.filter.highpass;
        self.work[0] = coeffs[0];
        let mut len = 1;
        while len < self.n {
            let next = 2 * len;
            self.tmp[..next].fill(0.0);
            for k in 0..len {
                let a = self.work[k];
                let d = coeffs[len + k];
                let mut idx = 2 * k;
                for (hi, gi) in h.iter().zip(g) {
                    if idx >= next {
                        idx %= next;
                    }
                    self.tmp[idx] += hi * a + gi * d;
                    idx += 1;
                }
            }
            self.work[..next].copy_from_slice(&self.tmp[..next]);
            len = next;
        }
        out.copy_from_slice(&self.work);
    }

    pub fn forward(&mut self, signal: &[f64]) -> CoefficientVector {
        let mut out = vec![0.0; self.n];
        self.forward_into(signal, &mut out);
        CoefficientVector {
            values: out,
            levels: self.n.trailing_zeros() as usize,
        }
    }

    pub fn inverse(&mut self, coeffs: &CoefficientVector) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.inverse_into(coeffs.as_slice(), &mut out);
        out
    }
}

/// Full periodic DWT of `signal` down to level 0.
pub fn dwt(signal: &[f64], filter: &WaveletFilter) -> Result<CoefficientVector> {
    let mut t = Transform::new(filter.clone(), signal.len())?;
    Ok(t.forward(signal))
}

/// Inverse of [`dwt`].
pub fn idwt(coeffs: &CoefficientVector, filter: &WaveletFilter) -> Result<Vec<f64>> {
    let mut t = Transform::new(filter.clone(), coeffs.len())?;
    Ok(t.inverse(coeffs))
}

/// Dense row-major square matrix. Only used as a test oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        let mut out = vec![0.0; self.n];
        for (i, vi) in v.iter().enumerate() {
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                *o += m * vi;
            }
        }
        out
    }

    /// `max |M M^T - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                let dot: f64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Materializes the DWT matrix `W` by transforming unit vectors: column `i`
/// holds `dwt(e_i)`, so `W * y == dwt(y)`.
pub fn build_matrix(n: usize, filter: &WaveletFilter) -> Result<DenseMatrix> {
    if n > MAX_MATRIX_SIZE {
        return Err(Error::invalid(format!(
            "explicit DWT matrix limited to n <= {MAX_MATRIX_SIZE}, got {n}"
        )));
    }
    let mut t = Transform::new(filter.clone(), n)?;
    let mut data = vec![0.0; n * n];
    let mut unit = vec![0.0; n];
    let mut col = vec![0.0; n];
    for i in 0..n {
        unit[i] = 1.0;
        t.forward_into(&unit, &mut col);
        unit[i] = 0.0;
        for (row, c) in col.iter().enumerate() {
            data[row * n + i] = *c;
        }
    }
    Ok(DenseMatrix { n, data })
}
