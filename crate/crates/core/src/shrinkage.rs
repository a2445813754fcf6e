//! Noise estimation, threshold rules and shrinkage functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Consistency constant of the median absolute value for Gaussian data.
pub const MAD_GAUSSIAN_SCALE: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ShrinkFlavor {
    #[default]
    Soft,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdMethod {
    NormalShrink,
    Universal,
}

/// A threshold value together with the rule that produced it and the
/// shrinkage applied with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub value: f64,
    pub method: ThresholdMethod,
    pub flavor: ShrinkFlavor,
}

impl ThresholdSpec {
    pub fn new(value: f64, method: ThresholdMethod, flavor: ShrinkFlavor) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidConfig(format!("threshold must be finite and >= 0, got {value}")));
        }
        Ok(Self { value, method, flavor })
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        shrink(values, self.value, self.flavor)
    }
}

/// How the NormalShrink noise variance is formed from the MAD estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NoiseVarianceForm {
    /// `(median|x| / 0.6745)^2`.
    #[default]
    Squared,
    /// `median|x| / 0.6745`, used as the variance without squaring.
    Unsquared,
}

/// Median of `values`; the mean of the two middle order statistics for
/// even lengths. Panics on empty input.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    values.sort_unstable_by(f64::total_cmp);
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Robust noise standard deviation, `median(|x|) / 0.6745`.
pub fn mad_sigma(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mut abs: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    Ok(median(&mut abs) / MAD_GAUSSIAN_SCALE)
}

/// Population standard deviation (divides by `n`).
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// NormalShrink scale parameter `sqrt(ln(scale_length / num_imfs))`.
pub fn normal_shrink_beta(scale_length: usize, num_imfs: usize) -> Result<f64> {
    if num_imfs == 0 || scale_length <= num_imfs {
        return Err(Error::ScaleParameterUndefined {
            frame_length: scale_length,
            num_imfs,
        });
    }
    Ok((scale_length as f64 / num_imfs as f64).ln().sqrt())
}

/// NormalShrink threshold `beta * sigma_noise^2 / sigma_y`.
///
/// `sigma_noise` is [`mad_sigma`] of `values`, `sigma_y` their population
/// standard deviation and `beta` comes from [`normal_shrink_beta`]. A
/// (near-)constant input gets threshold 0.
pub fn normal_shrink_threshold(
    values: &[f64],
    scale_length: usize,
    num_imfs: usize,
    variance_form: NoiseVarianceForm,
) -> Result<f64> {
    let beta = normal_shrink_beta(scale_length, num_imfs)?;
    let sigma = mad_sigma(values)?;
    let sigma_y = population_std(values);
    if sigma_y < 1e-15 {
        return Ok(0.0);
    }
    let variance = match variance_form {
        NoiseVarianceForm::Squared => sigma * sigma,
        NoiseVarianceForm::Unsquared => sigma,
    };
    Ok(beta * variance / sigma_y)
}

/// Donoho-Johnstone universal threshold `sigma * sqrt(2 ln n)`.
pub fn universal_threshold(noise_sigma: f64, n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    noise_sigma * (2.0 * (n as f64).ln()).sqrt()
}

/// `sign(x) * max(|x| - t, 0)`.
pub fn soft_threshold(values: &[f64], t: f64) -> Vec<f64> {
    values
        .iter()
        .map(|&x| {
            let mag = x.abs() - t;
            if mag > 0.0 {
                mag.copysign(x)
            } else {
                0.0
            }
        })
        .collect()
}

/// Keeps `x` where `|x| > t`, zero elsewhere.
pub fn hard_threshold(values: &[f64], t: f64) -> Vec<f64> {
    values
        .iter()
        .map(|&x| if x.abs() > t { x } else { 0.0 })
        .collect()
}

pub fn shrink(values: &[f64], t: f64, flavor: ShrinkFlavor) -> Vec<f64> {
    match flavor {
        ShrinkFlavor::Soft => soft_threshold(values, t),
        ShrinkFlavor::Hard => hard_threshold(values, t),
    }
}
