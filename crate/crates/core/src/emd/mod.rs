//! Empirical mode decomposition.
//!
//! The signal is split into intrinsic mode functions (IMFs), fastest
//! oscillation first, plus a slow residue:
//!
//! 1. locate the local extrema of the current residue;
//! 2. spline an upper envelope through the maxima and a lower one through
//!    the minima, and subtract their mean;
//! 3. repeat step 2 on the result (sifting) until the SD stopping test
//!    passes, which yields one IMF;
//! 4. subtract the IMF from the residue and start over, until the residue
//!    has fewer than three extrema.
//!
//! Summing every IMF and the residue gives back the input.

mod extrema;
mod sift;
mod spline;

use serde::{Deserialize, Serialize};

pub use extrema::{find_extrema, ExtremaSet};
pub use sift::{mean_envelope, sd_criterion, sift_one_imf, SiftOutcome};
pub use spline::{extend_knots, spline_envelope, BoundaryPolicy, Knot, NaturalSpline};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Stopping and interpolation knobs for sifting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiftConfig {
    /// SD threshold below which sifting stops.
    pub sd_threshold: f64,
    pub max_sift_iterations: usize,
    pub max_imfs: usize,
    pub boundary_policy: BoundaryPolicy,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            sd_threshold: 0.3,
            max_sift_iterations: 100,
            max_imfs: 20,
            boundary_policy: BoundaryPolicy::MirrorExtrema,
        }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sd_threshold > 0.0 && self.sd_threshold.is_finite()) {
            return Err(Error::InvalidConfig("sd_threshold must be positive and finite".into()));
        }
        if self.max_sift_iterations == 0 {
            return Err(Error::InvalidConfig("max_sift_iterations must be at least 1".into()));
        }
        if self.max_imfs == 0 {
            return Err(Error::InvalidConfig("max_imfs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// The residue has fewer than three extrema.
    ResidueExhausted,
    MaxImfsReached,
}

/// IMFs (fast to slow) plus the final residue.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfDecomposition {
    pub imfs: Vec<Signal>,
    pub residue: Signal,
    /// Sifting iterations spent on each IMF.
    pub sift_counts: Vec<usize>,
    /// SD between the last two sift iterates of each IMF.
    pub final_sd: Vec<f64>,
    pub stop_reason: StopReason,
}

impl ImfDecomposition {
    pub fn num_imfs(&self) -> usize {
        self.imfs.len()
    }

    pub fn len(&self) -> usize {
        self.residue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residue.is_empty()
    }
}

/// Decomposes `signal` into IMFs and a residue.
///
/// A constant (or otherwise extremum-free) signal yields zero IMFs and the
/// signal itself as residue.
pub fn decompose(signal: &Signal, config: &SiftConfig) -> Result<ImfDecomposition> {
    config.validate()?;
    if signal.len() < 4 {
        return Err(Error::SignalTooShort { min: 4, len: signal.len() });
    }

    let mut residue = signal.samples().to_vec();
    let mut imfs = Vec::new();
    let mut sift_counts = Vec::new();
    let mut final_sd = Vec::new();

    let stop_reason = loop {
        if find_extrema(&residue).count() < 3 {
            break StopReason::ResidueExhausted;
        }
        if imfs.len() == config.max_imfs {
            break StopReason::MaxImfsReached;
        }
        let outcome = match sift_one_imf(&residue, config) {
            Ok(o) => o,
            Err(Error::InsufficientExtrema) => break StopReason::ResidueExhausted,
            Err(e) => return Err(e),
        };
        for (r, v) in residue.iter_mut().zip(&outcome.imf) {
            *r -= v;
        }
        sift_counts.push(outcome.iterations);
        final_sd.push(outcome.final_sd);
        imfs.push(signal.with_samples(outcome.imf)?);
    };

    Ok(ImfDecomposition {
        imfs,
        residue: signal.with_samples(residue)?,
        sift_counts,
        final_sd,
        stop_reason,
    })
}

/// Sums every IMF and the residue.
pub fn reconstruct(decomp: &ImfDecomposition) -> Result<Signal> {
    let mut out = decomp.residue.samples().to_vec();
    for imf in &decomp.imfs {
        if imf.len() != out.len() {
            return Err(Error::LengthMismatch {
                expected: out.len(),
                found: imf.len(),
            });
        }
        for (o, v) in out.iter_mut().zip(imf.samples()) {
            *o += v;
        }
    }
    decomp.residue.with_samples(out)
}
