//! Orthonormal Haar DWT and universal-threshold wavelet shrinkage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shrinkage::{mad_sigma, shrink, universal_threshold, ShrinkFlavor};
use crate::signal::Signal;

use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Wavelet {
    #[default]
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DwtConfig {
    /// `None` picks `floor(log2 n) - 4`, at least 1.
    pub levels: Option<usize>,
    pub wavelet: Wavelet,
}

impl DwtConfig {
    pub fn resolve_levels(&self, len: usize) -> Result<usize> {
        let levels = match self.levels {
            Some(l) => l,
            None => (len.max(1).ilog2() as usize).saturating_sub(4).max(1),
        };
        if levels == 0 || levels >= usize::BITS as usize || (1usize << levels) > len {
            return Err(Error::LevelsTooDeep { levels, len });
        }
        Ok(levels)
    }
}

/// Haar coefficients: the coarsest approximation plus detail bands,
/// finest first.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarPyramid {
    pub approx: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub original_len: usize,
}

impl HaarPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn padded_len(&self) -> usize {
        self.approx.len() << self.details.len()
    }

    pub fn energy(&self) -> f64 {
        let e = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        e(&self.approx) + self.details.iter().map(|d| e(d)).sum::<f64>()
    }
}

/// Forward transform. The input is zero padded up to a multiple of
/// `2^levels`; the original length is kept for the inverse.
pub fn dwt_forward(samples: &[f64], config: &DwtConfig) -> Result<HaarPyramid> {
    let levels = config.resolve_levels(samples.len())?;
    let block = 1usize << levels;
    let mut approx = samples.to_vec();
    approx.resize(samples.len().div_ceil(block) * block, 0.0);

    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d): (Vec<f64>, Vec<f64>) = approx
            .chunks_exact(2)
            .map(|p| ((p[0] + p[1]) * FRAC_1_SQRT_2, (p[0] - p[1]) * FRAC_1_SQRT_2))
            .unzip();
        details.push(d);
        approx = a;
    }
    Ok(HaarPyramid {
        approx,
        details,
        original_len: samples.len(),
    })
}

pub fn dwt_inverse(pyramid: &HaarPyramid) -> Result<Vec<f64>> {
    let mut approx = pyramid.approx.clone();
    for detail in pyramid.details.iter().rev() {
        if detail.len() != approx.len() {
            return Err(Error::LengthMismatch {
                expected: approx.len(),
                found: detail.len(),
            });
        }
        approx = approx
            .iter()
            .zip(detail)
            .flat_map(|(a, d)| [(a + d) * FRAC_1_SQRT_2, (a - d) * FRAC_1_SQRT_2])
            .collect();
    }
    if pyramid.original_len > approx.len() {
        return Err(Error::LengthMismatch {
            expected: pyramid.original_len,
            found: approx.len(),
        });
    }
    approx.truncate(pyramid.original_len);
    Ok(approx)
}

/// Donoho-Johnstone shrinkage: noise sigma from the MAD of the finest
/// details, threshold `sigma * sqrt(2 ln n)` applied to every detail band.
pub fn universal_dwt_denoise(noisy: &Signal, flavor: ShrinkFlavor, config: &DwtConfig) -> Result<Signal> {
    let mut pyramid = dwt_forward(noisy.samples(), config)?;
    let sigma = mad_sigma(&pyramid.details[0])?;
    let t = universal_threshold(sigma, noisy.len());
    for band in pyramid.details.iter_mut() {
        *band = shrink(band, t, flavor);
    }
    noisy.with_samples(dwt_inverse(&pyramid)?)
}
