//! Synthetic speech-like test corpus.
//!
//! Every fixture is 8192 samples at 8000 Hz. Signals are gated into
//! syllable-like bursts with short raised-cosine ramps and silent gaps,
//! including a silent lead-in, and normalised to a peak of 0.5.

use std::f64::consts::TAU;

use crate::error::Result;
use crate::signal::{GaussianSource, Signal};

pub const FIXTURE_RATE_HZ: u32 = 8000;
pub const FIXTURE_LEN: usize = 8192;

/// Burst spans in seconds.
const BURSTS: [(f64, f64); 3] = [(0.12, 0.40), (0.50, 0.78), (0.86, 0.99)];
const RAMP_S: f64 = 0.02;

fn gate(t: f64) -> f64 {
    for &(start, end) in &BURSTS {
        if t >= start && t <= end {
            let edge = (t - start).min(end - t);
            return if edge >= RAMP_S {
                1.0
            } else {
                0.5 - 0.5 * (std::f64::consts::PI * edge / RAMP_S).cos()
            };
        }
    }
    0.0
}

fn time(i: usize) -> f64 {
    i as f64 / FIXTURE_RATE_HZ as f64
}

fn normalise(mut x: Vec<f64>) -> Result<Signal> {
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        x.iter_mut().for_each(|v| *v *= 0.5 / peak);
    }
    Signal::new(x, FIXTURE_RATE_HZ)
}

fn two_tone_am(f1: f64, f2: f64, mod_hz: f64) -> Result<Signal> {
    normalise(
        (0..FIXTURE_LEN)
            .map(|i| {
                let t = time(i);
                let am = 1.0 + 0.5 * (TAU * mod_hz * t).cos();
                gate(t) * am * ((TAU * f1 * t).sin() + 0.6 * (TAU * f2 * t).sin())
            })
            .collect(),
    )
}

fn chirp(f0: f64, f1: f64) -> Result<Signal> {
    let duration = FIXTURE_LEN as f64 / FIXTURE_RATE_HZ as f64;
    let rate = (f1 - f0) / duration;
    normalise(
        (0..FIXTURE_LEN)
            .map(|i| {
                let t = time(i);
                gate(t) * (TAU * (f0 * t + 0.5 * rate * t * t)).sin()
            })
            .collect(),
    )
}

/// Two-pole resonator applied in place.
fn resonate(x: &[f64], centre_hz: f64, radius: f64) -> Vec<f64> {
    let theta = TAU * centre_hz / FIXTURE_RATE_HZ as f64;
    let (a1, a2) = (2.0 * radius * theta.cos(), -radius * radius);
    let mut y = vec![0.0; x.len()];
    for i in 0..x.len() {
        let y1 = if i >= 1 { y[i - 1] } else { 0.0 };
        let y2 = if i >= 2 { y[i - 2] } else { 0.0 };
        y[i] = x[i] + a1 * y1 + a2 * y2;
    }
    y
}

fn filtered_noise_bursts() -> Result<Signal> {
    let excitation = GaussianSource::new(0x5EED).take(FIXTURE_LEN);
    let low = resonate(&excitation, 600.0, 0.97);
    let high = resonate(&excitation, 1700.0, 0.95);
    normalise(
        (0..FIXTURE_LEN)
            .map(|i| gate(time(i)) * (low[i] + 0.5 * high[i]))
            .collect(),
    )
}

fn vowel() -> Result<Signal> {
    let formants = [(700.0, 110.0), (1220.0, 130.0), (2600.0, 200.0)];
    let weight = |f: f64| -> f64 {
        formants
            .iter()
            .map(|&(centre, bw)| 1.0 / (1.0 + ((f - centre) / bw).powi(2)))
            .sum()
    };
    normalise(
        (0..FIXTURE_LEN)
            .map(|i| {
                let t = time(i);
                let f0 = 125.0;
                // 5 Hz vibrato of +-3 Hz, integrated into the phase
                let phase = f0 * t + 3.0 / (TAU * 5.0) * (1.0 - (TAU * 5.0 * t).cos());
                let voiced: f64 = (1..=24)
                    .map(|k| weight(k as f64 * f0) * (TAU * k as f64 * phase).sin())
                    .sum();
                gate(t) * voiced
            })
            .collect(),
    )
}

/// The fixture corpus as `(name, signal)` pairs, in a fixed order.
pub fn corpus() -> Result<Vec<(&'static str, Signal)>> {
    Ok(vec![
        ("two_tone_am", two_tone_am(220.0, 1150.0, 5.0)?),
        ("two_tone_am_low", two_tone_am(150.0, 600.0, 3.0)?),
        ("chirp", chirp(250.0, 1800.0)?),
        ("noise_bursts", filtered_noise_bursts()?),
        ("vowel", vowel()?),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let c = corpus().unwrap();
        assert_eq!(c.len(), 5);
        for (name, s) in &c {
            assert_eq!(s.len(), FIXTURE_LEN, "{name}");
            assert_eq!(s.sample_rate_hz(), FIXTURE_RATE_HZ);
            let peak = s.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!((peak - 0.5).abs() < 1e-12, "{name}");
            // silent lead-in
            assert!(s.samples()[..900].iter().all(|&v| v == 0.0), "{name}");
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(corpus().unwrap(), corpus().unwrap());
    }
}
