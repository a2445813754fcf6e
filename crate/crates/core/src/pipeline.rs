//! EMD-domain denoising.
//!
//! The noisy input is decomposed, every IMF is cut into disjoint frames,
//! and each frame is classified by comparing its mean power with the
//! squared noise level of that IMF. Signal-dominant frames are kept as
//! they are; noise-dominant frames are shrunk. The processed IMFs are
//! summed with the untouched residue.

use serde::{Deserialize, Serialize};

use crate::emd::{decompose, ImfDecomposition, SiftConfig};
use crate::error::{Error, Result};
use crate::shrinkage::{
    mad_sigma, normal_shrink_threshold, shrink, universal_threshold, NoiseVarianceForm, ShrinkFlavor,
    ThresholdMethod,
};
use crate::signal::{segment, Frame, Signal};

/// Where the per-IMF noise level used for frame classification comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum NoiseSigmaPolicy {
    /// MAD estimate over each whole IMF.
    #[default]
    PerImfMad,
    /// MAD estimate of the first IMF, shared by all IMFs.
    GlobalFirstImfMad,
    Known(f64),
}

/// Samples the NormalShrink statistics are computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StatsScope {
    #[default]
    PerFrame,
    PerImf,
}

/// Length used as `L_k` in the NormalShrink scale parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScaleLength {
    #[default]
    FrameWidth,
    ImfLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiseConfig {
    pub frame_length: usize,
    pub sift: SiftConfig,
    pub shrink_flavor: ShrinkFlavor,
    pub noise_sigma_policy: NoiseSigmaPolicy,
    /// Use `median|x|/0.6745` unsquared as the NormalShrink variance.
    pub paper_verbatim_variance: bool,
    pub stats_scope: StatsScope,
    pub scale_length: ScaleLength,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self {
            frame_length: 128,
            sift: SiftConfig::default(),
            shrink_flavor: ShrinkFlavor::Soft,
            noise_sigma_policy: NoiseSigmaPolicy::PerImfMad,
            paper_verbatim_variance: false,
            stats_scope: StatsScope::PerFrame,
            scale_length: ScaleLength::FrameWidth,
        }
    }
}

impl DenoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frame_length < 2 {
            return Err(Error::InvalidConfig("frame_length must be at least 2".into()));
        }
        if let NoiseSigmaPolicy::Known(v) = self.noise_sigma_policy {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("known noise sigma must be finite and >= 0, got {v}")));
            }
        }
        self.sift.validate()
    }

    fn variance_form(&self) -> NoiseVarianceForm {
        if self.paper_verbatim_variance {
            NoiseVarianceForm::Unsquared
        } else {
            NoiseVarianceForm::Squared
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dominance {
    SignalDominant,
    NoiseDominant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameDecision {
    /// Zero-based IMF index.
    pub imf_index: usize,
    pub frame: Frame,
    pub mean_power: f64,
    /// Squared noise level the mean power was compared with.
    pub noise_power_ref: f64,
    pub dominant: Dominance,
    /// 0 for signal-dominant frames.
    pub applied_threshold: f64,
    /// Rule that produced `applied_threshold`; `None` when not shrunk.
    pub threshold_rule: Option<ThresholdMethod>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseTrace {
    pub decomposition: ImfDecomposition,
    pub noise_sigmas: Vec<f64>,
    pub decisions: Vec<FrameDecision>,
    pub processed_imfs: Vec<Signal>,
    pub denoised: Signal,
}

impl DenoiseTrace {
    pub fn count(&self, dominance: Dominance) -> usize {
        self.decisions.iter().filter(|d| d.dominant == dominance).count()
    }
}

/// Mean power of the frame and its classification against `noise_sigma^2`.
/// Equality counts as signal-dominant.
pub fn classify_frame(values: &[f64], noise_sigma: f64) -> (f64, Dominance) {
    let mean_power = values.iter().map(|x| x * x).sum::<f64>() / values.len().max(1) as f64;
    let dominance = if mean_power >= noise_sigma * noise_sigma {
        Dominance::SignalDominant
    } else {
        Dominance::NoiseDominant
    };
    (mean_power, dominance)
}

/// One noise level per IMF according to `policy`.
pub fn estimate_noise_sigma(decomp: &ImfDecomposition, policy: NoiseSigmaPolicy) -> Result<Vec<f64>> {
    let first = decomp.imfs.first().ok_or(Error::EmptyDecomposition)?;
    let n = decomp.num_imfs();
    match policy {
        NoiseSigmaPolicy::PerImfMad => decomp.imfs.iter().map(|imf| mad_sigma(imf.samples())).collect(),
        NoiseSigmaPolicy::GlobalFirstImfMad => Ok(vec![mad_sigma(first.samples())?; n]),
        NoiseSigmaPolicy::Known(v) => Ok(vec![v; n]),
    }
}

#[derive(Debug, Clone, Copy)]
enum Rule {
    NormalShrink,
    Universal(ShrinkFlavor),
}

/// The proposed denoiser: EMD, per-IMF framing, frame classification and
/// NormalShrink on noise-dominant frames.
pub fn denoise_emd_normalshrink(noisy: &Signal, config: &DenoiseConfig) -> Result<DenoiseTrace> {
    run(noisy, config, Rule::NormalShrink)
}

/// Same pipeline with the universal threshold `sigma_n * sqrt(2 ln len)`
/// in place of NormalShrink.
pub fn denoise_emd_universal(noisy: &Signal, flavor: ShrinkFlavor, config: &DenoiseConfig) -> Result<DenoiseTrace> {
    run(noisy, config, Rule::Universal(flavor))
}

fn run(noisy: &Signal, config: &DenoiseConfig, rule: Rule) -> Result<DenoiseTrace> {
    config.validate()?;
    let decomposition = decompose(noisy, &config.sift)?;
    if decomposition.imfs.is_empty() {
        return Ok(DenoiseTrace {
            denoised: noisy.clone(),
            decomposition,
            noise_sigmas: vec![],
            decisions: vec![],
            processed_imfs: vec![],
        });
    }

    let noise_sigmas = estimate_noise_sigma(&decomposition, config.noise_sigma_policy)?;
    let num_imfs = decomposition.num_imfs();
    let mut decisions = Vec::new();
    let mut processed_imfs = Vec::with_capacity(num_imfs);

    for (j, (imf, &sigma)) in decomposition.imfs.iter().zip(&noise_sigmas).enumerate() {
        let mut processed = Vec::with_capacity(imf.len());
        for frame in segment(imf.samples(), config.frame_length)? {
            let (mean_power, dominant) = classify_frame(&frame.values, sigma);
            let (applied_threshold, threshold_rule) = match dominant {
                Dominance::SignalDominant => {
                    processed.extend_from_slice(&frame.values);
                    (0.0, None)
                }
                Dominance::NoiseDominant => {
                    let (t, method, flavor) = frame_threshold(&frame, imf.samples(), sigma, num_imfs, config, rule)?;
                    processed.extend(shrink(&frame.values, t, flavor));
                    (t, Some(method))
                }
            };
            decisions.push(FrameDecision {
                imf_index: j,
                frame,
                mean_power,
                noise_power_ref: sigma * sigma,
                dominant,
                applied_threshold,
                threshold_rule,
            });
        }
        processed_imfs.push(imf.with_samples(processed)?);
    }

    let mut denoised = decomposition.residue.samples().to_vec();
    for imf in &processed_imfs {
        for (d, v) in denoised.iter_mut().zip(imf.samples()) {
            *d += v;
        }
    }

    Ok(DenoiseTrace {
        denoised: noisy.with_samples(denoised)?,
        decomposition,
        noise_sigmas,
        decisions,
        processed_imfs,
    })
}

fn frame_threshold(
    frame: &Frame,
    imf: &[f64],
    sigma: f64,
    num_imfs: usize,
    config: &DenoiseConfig,
    rule: Rule,
) -> Result<(f64, ThresholdMethod, ShrinkFlavor)> {
    let universal = universal_threshold(sigma, frame.len());
    match rule {
        Rule::Universal(flavor) => Ok((universal, ThresholdMethod::Universal, flavor)),
        Rule::NormalShrink => {
            let stats = match config.stats_scope {
                StatsScope::PerFrame => &frame.values[..],
                StatsScope::PerImf => imf,
            };
            let scale_length = match config.scale_length {
                ScaleLength::FrameWidth => frame.len(),
                ScaleLength::ImfLength => imf.len(),
            };
            match normal_shrink_threshold(stats, scale_length, num_imfs, config.variance_form()) {
                Ok(t) => Ok((t, ThresholdMethod::NormalShrink, config.shrink_flavor)),
                // short trailing frames: beta undefined
                Err(Error::ScaleParameterUndefined { .. }) => {
                    Ok((universal, ThresholdMethod::Universal, config.shrink_flavor))
                }
                Err(e) => Err(e),
            }
        }
    }
}
