//! Sampled signals, seeded white Gaussian noise, framing and SNR metrics.
//!
//! All arithmetic is `f64`. Noise is drawn from ChaCha8 (`rand_chacha`),
//! seeded with `seed_from_u64`, and converted to Gaussian variates with the
//! Box-Muller transform, so a given seed produces the same noise on every
//! platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, uniformly sampled real-valued sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if sample_rate_hz == 0 {
            return Err(Error::InvalidSampleRate);
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    /// Builds a signal of `len` samples from `f(index)`.
    pub fn from_fn(len: usize, sample_rate_hz: u32, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new((0..len).map(f).collect(), sample_rate_hz)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    /// Same sample rate, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.sample_rate_hz)
    }
}

/// Sum of squares.
pub fn energy(values: &[f64]) -> f64 {
    values.iter().map(|x| x * x).sum()
}

/// One contiguous segment of a parent signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub start_index: usize,
    pub values: Vec<f64>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end_index(&self) -> usize {
        self.start_index + self.values.len()
    }
}

/// Splits `samples` into consecutive non-overlapping frames of
/// `frame_length`. Only the last frame may be shorter.
pub fn segment(samples: &[f64], frame_length: usize) -> Result<Vec<Frame>> {
    if frame_length == 0 {
        return Err(Error::InvalidConfig("frame length must be at least 1".into()));
    }
    Ok(samples
        .chunks(frame_length)
        .enumerate()
        .map(|(i, chunk)| Frame {
            start_index: i * frame_length,
            values: chunk.to_vec(),
        })
        .collect())
}

/// Target input SNR and RNG seed for one noise realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub target_input_snr_db: f64,
    pub seed: u64,
}

/// Deterministic standard normal source: ChaCha8 + Box-Muller.
pub struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in (0, 1].
    fn open_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.open_unit();
        let u2 = self.open_unit();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn take(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_gaussian()).collect()
    }
}

/// Adds white Gaussian noise scaled against its realized energy so that
/// `10 log10(E_clean / E_noise)` hits the target exactly.
///
/// Returns `(noisy, noise)`.
pub fn add_awgn(clean: &Signal, spec: &NoiseSpec) -> Result<(Signal, Signal)> {
    let clean_energy = clean.energy();
    if clean_energy <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let raw = GaussianSource::new(spec.seed).take(clean.len());
    let raw_energy = energy(&raw);
    let wanted = clean_energy / 10f64.powf(spec.target_input_snr_db / 10.0);
    let scale = (wanted / raw_energy).sqrt();
    let noise: Vec<f64> = raw.iter().map(|x| x * scale).collect();
    let noisy: Vec<f64> = clean
        .samples()
        .iter()
        .zip(&noise)
        .map(|(c, n)| c + n)
        .collect();
    Ok((clean.with_samples(noisy)?, clean.with_samples(noise)?))
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

fn error_energy(reference: &[f64], estimate: &[f64]) -> f64 {
    reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| (r - e) * (r - e))
        .sum()
}

/// Conventional SNR in dB: reference energy over error energy.
///
/// Returns `f64::INFINITY` when the estimate is exact.
pub fn snr_db(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_lengths(reference, estimate)?;
    let signal = energy(reference);
    if signal <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let error = error_energy(reference, estimate);
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / error).log10())
}

/// Output SNR with the denoised energy in the numerator:
/// `10 log10(sum(denoised^2) / sum((clean - denoised)^2))`.
///
/// `+inf` when the error is zero, `-inf` when the denoised signal is zero.
pub fn snr_out_paper(clean: &[f64], denoised: &[f64]) -> Result<f64> {
    check_lengths(clean, denoised)?;
    let error = error_energy(clean, denoised);
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (energy(denoised) / error).log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(len: usize) -> Signal {
        Signal::from_fn(len, 8000, |i| (i as f64 * 0.05).sin()).unwrap()
    }

    #[test]
    fn signal_rejects_bad_input() {
        assert!(matches!(Signal::new(vec![], 8000), Err(Error::EmptySignal)));
        assert!(matches!(Signal::new(vec![1.0], 0), Err(Error::InvalidSampleRate)));
        assert!(matches!(
            Signal::new(vec![1.0, f64::NAN], 8000),
            Err(Error::NonFiniteSample { index: 1 })
        ));
    }

    #[test]
    fn awgn_zero_db_matches_energies() {
        let clean = sine(1000);
        let (_, noise) = add_awgn(&clean, &NoiseSpec { target_input_snr_db: 0.0, seed: 3 }).unwrap();
        let rel = (noise.energy() - clean.energy()).abs() / clean.energy();
        assert!(rel < 1e-9, "{rel}");
    }

    #[test]
    fn awgn_huge_snr_gives_no_noise() {
        let clean = sine(256);
        let (noisy, noise) = add_awgn(&clean, &NoiseSpec { target_input_snr_db: 1e9, seed: 1 }).unwrap();
        assert!(noise.samples().iter().all(|x| x.abs() < 1e-300));
        assert_eq!(noisy.samples(), clean.samples());
    }

    #[test]
    fn awgn_realized_snr_unit_sine() {
        let clean = Signal::from_fn(1024, 8000, |i| {
            (std::f64::consts::TAU * 440.0 * i as f64 / 8000.0).sin()
        })
        .unwrap();
        let (noisy, _) = add_awgn(&clean, &NoiseSpec { target_input_snr_db: 10.0, seed: 42 }).unwrap();
        let snr = snr_db(clean.samples(), noisy.samples()).unwrap();
        assert!((snr - 10.0).abs() < 1e-9, "{snr}");
    }

    #[test]
    fn awgn_rejects_silence() {
        let clean = Signal::new(vec![0.0; 16], 8000).unwrap();
        let err = add_awgn(&clean, &NoiseSpec { target_input_snr_db: 0.0, seed: 0 }).unwrap_err();
        assert!(err.to_string().contains("cannot define SNR"));
    }

    #[test]
    fn gaussian_source_moments() {
        let z = GaussianSource::new(9).take(200_000);
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let var = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / z.len() as f64;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn snr_db_examples() {
        let s = [1.0, -2.0, 0.5];
        assert_eq!(snr_db(&s, &s).unwrap(), f64::INFINITY);
        assert!(snr_db(&s, &[0.0; 3]).unwrap().abs() < 1e-12);
        let mut reference = vec![0.0; 8];
        let mut estimate = vec![0.0; 8];
        reference[0] = 1.0;
        estimate[0] = 0.9;
        assert!((snr_db(&reference, &estimate).unwrap() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn snr_db_errors() {
        assert!(matches!(
            snr_db(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(snr_db(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroEnergy)));
    }

    #[test]
    fn snr_out_paper_examples() {
        assert!(snr_out_paper(&[1.0], &[0.5]).unwrap().abs() < 1e-12);
        assert_eq!(snr_out_paper(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), f64::NEG_INFINITY);
        assert_eq!(snr_out_paper(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), f64::INFINITY);

        let clean: Vec<f64> = (0..500).map(|i| (i as f64 * 0.1).sin()).collect();
        let eps: Vec<f64> = (0..500).map(|i| 1e-4 * ((i * 7 % 11) as f64 - 5.0)).collect();
        let denoised: Vec<f64> = clean.iter().zip(&eps).map(|(c, e)| c + e).collect();
        let expected = 10.0 * (energy(&clean) / energy(&eps)).log10();
        assert!((snr_out_paper(&clean, &denoised).unwrap() - expected).abs() < 1e-3);
        assert!(snr_out_paper(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn segment_examples() {
        let lens = |n: usize, l: usize| -> Vec<usize> {
            segment(&vec![0.0; n], l).unwrap().iter().map(Frame::len).collect()
        };
        assert_eq!(lens(8192, 128), vec![128; 64]);
        assert_eq!(lens(130, 128), vec![128, 2]);
        assert_eq!(lens(100, 128), vec![100]);
        assert!(segment(&[1.0], 0).is_err());
    }
}
