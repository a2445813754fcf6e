//! Output-SNR benchmark over a corpus, an input-SNR sweep and a seed
//! ensemble.
//!
//! Every (file, input SNR, seed) triple gets one noise realization from
//! [`add_awgn`] with that seed, and every requested method is run on it.
//! Results are collected in key order, so the report does not depend on
//! scheduling.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{universal_dwt_denoise, wiener_denoise, DwtConfig, NoisePower, WienerConfig, WINDOW_DESCRIPTION};
use crate::error::{Error, Result};
use crate::pipeline::{denoise_emd_normalshrink, denoise_emd_universal, DenoiseConfig, DenoiseTrace, NoiseSigmaPolicy};
use crate::shrinkage::ShrinkFlavor;
use crate::signal::{add_awgn, snr_db, snr_out_paper, NoiseSpec, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// EMD + NormalShrink.
    Proposed,
    EmdUniversalSoft,
    EmdUniversalHard,
    DwtSoft,
    DwtHard,
    Wiener,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Proposed,
        Method::EmdUniversalSoft,
        Method::EmdUniversalHard,
        Method::DwtSoft,
        Method::DwtHard,
        Method::Wiener,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::EmdUniversalSoft => "emd-universal-soft",
            Method::EmdUniversalHard => "emd-universal-hard",
            Method::DwtSoft => "dwt-soft",
            Method::DwtHard => "dwt-hard",
            Method::Wiener => "wiener",
        }
    }

    pub fn is_emd(self) -> bool {
        matches!(self, Method::Proposed | Method::EmdUniversalSoft | Method::EmdUniversalHard)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

/// Per-method settings shared by the CLI and the benchmark.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub denoise: DenoiseConfig,
    pub wiener: WienerConfig,
    pub dwt: DwtConfig,
}

/// Output of one method; EMD methods also return their trace.
pub struct MethodOutput {
    pub denoised: Signal,
    pub trace: Option<DenoiseTrace>,
}

pub fn run_method(method: Method, noisy: &Signal, config: &MethodConfig) -> Result<MethodOutput> {
    let plain = |denoised| MethodOutput { denoised, trace: None };
    let traced = |trace: DenoiseTrace| MethodOutput {
        denoised: trace.denoised.clone(),
        trace: Some(trace),
    };
    Ok(match method {
        Method::Proposed => traced(denoise_emd_normalshrink(noisy, &config.denoise)?),
        Method::EmdUniversalSoft => traced(denoise_emd_universal(noisy, ShrinkFlavor::Soft, &config.denoise)?),
        Method::EmdUniversalHard => traced(denoise_emd_universal(noisy, ShrinkFlavor::Hard, &config.denoise)?),
        Method::DwtSoft => plain(universal_dwt_denoise(noisy, ShrinkFlavor::Soft, &config.dwt)?),
        Method::DwtHard => plain(universal_dwt_denoise(noisy, ShrinkFlavor::Hard, &config.dwt)?),
        Method::Wiener => plain(wiener_denoise(noisy, &config.wiener)?),
    })
}

/// How methods that take a noise level get it during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseLevel {
    /// The RMS of the injected noise is handed to the EMD methods
    /// (`Known(sigma)`) and to the Wiener filter (`Known(sigma^2)`).
    #[default]
    Known,
    /// Methods use their own configured estimators.
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub input_snrs_db: Vec<f64>,
    /// Seeds `0..seeds` are used for every file and SNR.
    pub seeds: u64,
    pub methods: Vec<Method>,
    pub noise_level: NoiseLevel,
    pub methods_config: MethodConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            input_snrs_db: vec![0.0, 5.0, 10.0, 15.0],
            seeds: 10,
            methods: vec![Method::DwtSoft, Method::DwtHard, Method::Wiener, Method::Proposed],
            noise_level: NoiseLevel::Known,
            methods_config: MethodConfig::default(),
        }
    }
}

impl BenchConfig {
    /// SHA-256 over the canonical JSON of the configuration.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub file: String,
    pub input_snr_db: f64,
    pub seed: u64,
    pub method: Method,
    pub snr_out_paper: f64,
    pub snr_db: f64,
    pub signal_dominant_frames: Option<usize>,
    pub noise_dominant_frames: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub file: String,
    pub input_snr_db: f64,
    pub seed: u64,
    pub method: Option<Method>,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub method: Method,
    pub input_snr_db: f64,
    pub trials: usize,
    pub snr_out_paper: Summary,
    pub snr_db: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Unix seconds; the only field that differs between identical runs.
    pub generated_at_unix: u64,
    pub config_fingerprint: String,
    pub config: BenchConfig,
    pub wiener_window: String,
    pub files: Vec<String>,
    pub cells: Vec<Cell>,
    pub trials: Vec<Trial>,
    pub failures: Vec<TrialFailure>,
}

impl BenchReport {
    pub fn cell(&self, method: Method, input_snr_db: f64) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.input_snr_db == input_snr_db)
    }
}

fn noise_aware(config: &MethodConfig, level: NoiseLevel, sigma: f64) -> MethodConfig {
    let mut cfg = *config;
    if level == NoiseLevel::Known {
        cfg.denoise.noise_sigma_policy = NoiseSigmaPolicy::Known(sigma);
        cfg.wiener.noise_power = NoisePower::Known(sigma * sigma);
    }
    cfg
}

fn run_key(
    file: &str,
    clean: &Signal,
    input_snr_db: f64,
    seed: u64,
    config: &BenchConfig,
) -> (Vec<Trial>, Vec<TrialFailure>) {
    let fail = |method, error: Error| TrialFailure {
        file: file.to_string(),
        input_snr_db,
        seed,
        method,
        error: error.to_string(),
    };
    let (noisy, noise) = match add_awgn(clean, &NoiseSpec { target_input_snr_db: input_snr_db, seed }) {
        Ok(pair) => pair,
        Err(e) => return (vec![], vec![fail(None, e)]),
    };
    let sigma = (noise.energy() / noise.len() as f64).sqrt();
    let cfg = noise_aware(&config.methods_config, config.noise_level, sigma);

    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for &method in &config.methods {
        let scored = run_method(method, &noisy, &cfg).and_then(|out| {
            let c = clean.samples();
            let d = out.denoised.samples();
            Ok(Trial {
                file: file.to_string(),
                input_snr_db,
                seed,
                method,
                snr_out_paper: snr_out_paper(c, d)?,
                snr_db: snr_db(c, d)?,
                signal_dominant_frames: out.trace.as_ref().map(|t| t.count(crate::pipeline::Dominance::SignalDominant)),
                noise_dominant_frames: out.trace.as_ref().map(|t| t.count(crate::pipeline::Dominance::NoiseDominant)),
            })
        });
        match scored {
            Ok(t) => trials.push(t),
            Err(e) => failures.push(fail(Some(method), e)),
        }
    }
    (trials, failures)
}

/// Runs the full sweep. `corpus` is `(name, clean signal)` in report order.
pub fn run_bench(corpus: &[(String, Signal)], config: &BenchConfig) -> Result<BenchReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidConfig("empty corpus".into()));
    }
    if config.methods.is_empty() || config.input_snrs_db.is_empty() || config.seeds == 0 {
        return Err(Error::InvalidConfig("bench needs at least one method, SNR and seed".into()));
    }

    let keys: Vec<(usize, f64, u64)> = (0..corpus.len())
        .flat_map(|f| {
            config
                .input_snrs_db
                .iter()
                .flat_map(move |&snr| (0..config.seeds).map(move |seed| (f, snr, seed)))
        })
        .collect();

    let results: Vec<(Vec<Trial>, Vec<TrialFailure>)> = keys
        .par_iter()
        .map(|&(f, snr, seed)| run_key(&corpus[f].0, &corpus[f].1, snr, seed, config))
        .collect();

    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for (t, f) in results {
        trials.extend(t);
        failures.extend(f);
    }

    let mut cells = Vec::new();
    for &snr in &config.input_snrs_db {
        for &method in &config.methods {
            let selected: Vec<&Trial> = trials
                .iter()
                .filter(|t| t.method == method && t.input_snr_db == snr)
                .collect();
            if selected.is_empty() {
                continue;
            }
            let paper: Vec<f64> = selected.iter().map(|t| t.snr_out_paper).collect();
            let conventional: Vec<f64> = selected.iter().map(|t| t.snr_db).collect();
            cells.push(Cell {
                method,
                input_snr_db: snr,
                trials: selected.len(),
                snr_out_paper: Summary::of(&paper),
                snr_db: Summary::of(&conventional),
            });
        }
    }

    Ok(BenchReport {
        generated_at_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config_fingerprint: config.fingerprint(),
        config: config.clone(),
        wiener_window: WINDOW_DESCRIPTION.to_string(),
        files: corpus.iter().map(|(name, _)| name.clone()).collect(),
        cells,
        trials,
        failures,
    })
}

/// Table with one row per input SNR and one column per method; cells are
/// `mean±std` of the output SNR with denoised energy in the numerator.
pub fn report_csv(report: &BenchReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidConfig(format!("csv: {e}"));

    let mut header = vec!["input_snr_db".to_string()];
    header.extend(report.config.methods.iter().map(|m| m.name().to_string()));
    writer.write_record(&header).map_err(csv_err)?;

    for &snr in &report.config.input_snrs_db {
        let mut row = vec![format!("{snr}")];
        for &method in &report.config.methods {
            row.push(match report.cell(method, snr) {
                Some(c) => format!("{:.4}±{:.4}", c.snr_out_paper.mean, c.snr_out_paper.std),
                None => String::new(),
            });
        }
        writer.write_record(&row).map_err(csv_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::InvalidConfig(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
