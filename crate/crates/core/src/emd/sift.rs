use super::extrema::find_extrema;
use super::spline::{extend_knots, spline_envelope};
use super::SiftConfig;
use crate::error::{Error, Result};

/// Mean of the upper (maxima) and lower (minima) spline envelopes.
pub fn mean_envelope(signal: &[f64], config: &SiftConfig) -> Result<Vec<f64>> {
    let extrema = find_extrema(signal);
    if extrema.maxima.is_empty() || extrema.minima.is_empty() {
        return Err(Error::InsufficientExtrema);
    }
    let n = signal.len();
    let upper = spline_envelope(&extend_knots(&extrema.maxima, signal, config.boundary_policy), n)?;
    let lower = spline_envelope(&extend_knots(&extrema.minima, signal, config.boundary_policy), n)?;
    Ok(upper.iter().zip(&lower).map(|(u, l)| 0.5 * (u + l)).collect())
}

/// Sum over samples of `(prev - next)^2 / prev^2`.
///
/// Samples where `|prev|` is below `1e-12 * max|prev|` are left out of the
/// sum, since the ratio is undefined at zeros of `prev`.
pub fn sd_criterion(prev: &[f64], next: &[f64]) -> f64 {
    let peak = prev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    let floor = 1e-12 * peak;
    prev.iter()
        .zip(next)
        .filter(|(p, _)| p.abs() >= floor)
        .map(|(p, q)| (p - q) * (p - q) / (p * p))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftOutcome {
    pub imf: Vec<f64>,
    pub iterations: usize,
    /// SD between the last two iterates.
    pub final_sd: f64,
}

/// Extracts one IMF from `input` by repeatedly subtracting the mean
/// envelope.
///
/// Stops when the SD between consecutive iterates drops below
/// `sd_threshold`, or after `max_sift_iterations`. If the iterate loses its
/// extrema part-way, the last valid iterate is returned.
pub fn sift_one_imf(input: &[f64], config: &SiftConfig) -> Result<SiftOutcome> {
    let mut h = input.to_vec();
    let mut iterations = 0;
    let mut final_sd = f64::INFINITY;

    while iterations < config.max_sift_iterations {
        let mean = match mean_envelope(&h, config) {
            Ok(m) => m,
            Err(Error::InsufficientExtrema) if iterations > 0 => break,
            Err(e) => return Err(e),
        };
        let next: Vec<f64> = h.iter().zip(&mean).map(|(x, m)| x - m).collect();
        final_sd = sd_criterion(&h, &next);
        h = next;
        iterations += 1;
        if final_sd < config.sd_threshold {
            break;
        }
    }

    Ok(SiftOutcome {
        imf: h,
        iterations,
        final_sd,
    })
}
