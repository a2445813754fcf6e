//! Short-time spectral Wiener-style gain with overlap-add resynthesis.
//!
//! Each frame is multiplied by a periodic Hann window (rectangular when
//! frames do not overlap), transformed, scaled per bin by
//! `G = max(0, (P - sigma^2 L) / P)` and transformed back. `P` is the
//! frame periodogram normalised by the window energy so that white noise
//! of variance `sigma^2` has expected level `sigma^2 L` in every bin. The
//! overlap-added output is divided by the overlapped window sum, which is
//! constant in the interior for the default 50% overlap and makes unity
//! gain an exact round trip for any hop.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoisePower {
    /// Noise variance per sample.
    Known(f64),
    /// Mean power of the samples spanned by the first `k` frames.
    EstimateFromFirstFrames(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WienerConfig {
    pub fft_frame_length: usize,
    pub overlap_fraction: f64,
    pub noise_power: NoisePower,
}

impl Default for WienerConfig {
    fn default() -> Self {
        Self {
            fft_frame_length: 256,
            overlap_fraction: 0.5,
            noise_power: NoisePower::EstimateFromFirstFrames(6),
        }
    }
}

/// Human-readable window description for reports.
pub const WINDOW_DESCRIPTION: &str =
    "periodic Hann analysis window (rectangular at zero overlap), overlap-add normalised by the overlapped window sum";

impl WienerConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.fft_frame_length.is_power_of_two() || self.fft_frame_length < 2 {
            return Err(Error::InvalidConfig("fft_frame_length must be a power of two >= 2".into()));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidConfig("overlap_fraction must lie in [0, 1)".into()));
        }
        match self.noise_power {
            NoisePower::Known(v) if !(v >= 0.0 && v.is_finite()) => {
                Err(Error::InvalidConfig("known noise power must be finite and >= 0".into()))
            }
            NoisePower::EstimateFromFirstFrames(0) => {
                Err(Error::InvalidConfig("noise estimate needs at least one frame".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn hop(&self) -> usize {
        let len = self.fft_frame_length;
        if self.overlap_fraction == 0.0 {
            return len;
        }
        ((len as f64 * (1.0 - self.overlap_fraction)).round() as usize).clamp(1, len - 1)
    }

    fn window(&self) -> Vec<f64> {
        let len = self.fft_frame_length;
        if self.overlap_fraction == 0.0 {
            return vec![1.0; len];
        }
        (0..len)
            .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / len as f64).cos())
            .collect()
    }
}

/// Spectral gain for one bin, always in `[0, 1]`.
pub fn wiener_gain(power: f64, noise_floor: f64) -> f64 {
    if noise_floor <= 0.0 {
        return 1.0;
    }
    if power <= 0.0 {
        return 0.0;
    }
    ((power - noise_floor) / power).clamp(0.0, 1.0)
}

fn noise_variance(samples: &[f64], config: &WienerConfig) -> f64 {
    match config.noise_power {
        NoisePower::Known(v) => v,
        NoisePower::EstimateFromFirstFrames(k) => {
            let span = (k.saturating_sub(1) * config.hop() + config.fft_frame_length).min(samples.len());
            samples[..span].iter().map(|x| x * x).sum::<f64>() / span as f64
        }
    }
}

pub fn wiener_denoise(noisy: &Signal, config: &WienerConfig) -> Result<Signal> {
    config.validate()?;
    let len = config.fft_frame_length;
    let samples = noisy.samples();
    if samples.len() < len {
        return Err(Error::SignalTooShort { min: len, len: samples.len() });
    }
    let hop = config.hop();
    let window = config.window();
    let window_energy: f64 = window.iter().map(|w| w * w).sum();
    let noise_floor = noise_variance(samples, config) * len as f64;

    // zero padding so every input sample sees the full set of overlapping frames
    let n = samples.len();
    let frames = (n + len).div_ceil(hop) + 1;
    let padded_len = (frames - 1) * hop + len;
    let mut padded = vec![0.0; padded_len];
    padded[len..len + n].copy_from_slice(samples);

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);
    let mut out = vec![0.0; padded_len];
    let mut weight = vec![0.0; padded_len];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];

    for f in 0..frames {
        let start = f * hop;
        for (b, (x, w)) in buf.iter_mut().zip(padded[start..start + len].iter().zip(&window)) {
            *b = Complex64::new(x * w, 0.0);
        }
        forward.process(&mut buf);
        for b in buf.iter_mut() {
            let power = b.norm_sqr() * len as f64 / window_energy;
            *b *= wiener_gain(power, noise_floor);
        }
        inverse.process(&mut buf);
        for i in 0..len {
            out[start + i] += buf[i].re / len as f64;
            weight[start + i] += window[i];
        }
    }

    let denoised = (len..len + n).map(|i| out[i] / weight[i]).collect();
    noisy.with_samples(denoised)
}
