use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use emdshrink::baselines::{DwtConfig, NoisePower, WienerConfig};
use emdshrink::bench::{report_csv, run_bench, run_method, BenchConfig, Method, MethodConfig, NoiseLevel};
use emdshrink::emd::{decompose, find_extrema, BoundaryPolicy, SiftConfig, StopReason};
use emdshrink::fixtures;
use emdshrink::io_wav::{load_wav, save_signal};
use emdshrink::pipeline::{DenoiseConfig, Dominance, NoiseSigmaPolicy, ScaleLength, StatsScope};
use emdshrink::signal::{add_awgn, snr_db, snr_out_paper, NoiseSpec, Signal};

#[derive(Parser)]
#[command(name = "emdshrink", version, about = "EMD-based speech denoising and SNR benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write every IMF and the residue as WAV files plus a JSON summary.
    Decompose {
        input: PathBuf,
        #[arg(long, default_value = "imfs")]
        out_dir: PathBuf,
        #[command(flatten)]
        sift: SiftArgs,
    },
    /// Add seeded white Gaussian noise at a target SNR.
    AddNoise {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        snr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "noisy.wav")]
        out: PathBuf,
        /// Defaults to the output path with a .json extension.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Denoise a WAV file with one method.
    Denoise {
        input: PathBuf,
        #[arg(long, default_value = "proposed")]
        method: Method,
        /// Clean reference; enables SNR metrics.
        #[arg(long)]
        clean: Option<PathBuf>,
        #[arg(long, default_value = "denoised.wav")]
        out: PathBuf,
        #[arg(long, default_value = "metrics.json")]
        metrics: PathBuf,
        /// Known noise RMS; overrides estimation for EMD methods and the Wiener filter.
        #[arg(long)]
        noise_sigma: Option<f64>,
        #[command(flatten)]
        methods: MethodArgs,
    },
    /// Run the output-SNR sweep over a directory of WAV files.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,5,10,15", allow_hyphen_values = true)]
        snrs: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', default_value = "dwt-soft,dwt-hard,wiener,proposed")]
        methods: Vec<Method>,
        #[arg(long, default_value = "bench")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = NoiseLevelArg::Known)]
        noise_level: NoiseLevelArg,
        #[command(flatten)]
        method_args: MethodArgs,
    },
    /// Synthesize the fixture corpus (8192 samples at 8000 Hz each).
    MakeFixtures {
        #[arg(long, default_value = "fixtures")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseLevelArg {
    /// Hand the injected noise RMS to noise-aware methods.
    Known,
    /// Let every method estimate its own noise level.
    Estimated,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Mirror,
    Clamp,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    PerImfMad,
    GlobalFirstImfMad,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    PerFrame,
    PerImf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    FrameWidth,
    ImfLength,
}

#[derive(Args)]
struct SiftArgs {
    #[arg(long, default_value_t = 0.3)]
    sd_threshold: f64,
    #[arg(long, default_value_t = 100)]
    max_sift_iterations: usize,
    #[arg(long, default_value_t = 20)]
    max_imfs: usize,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Mirror)]
    boundary: BoundaryArg,
}

impl SiftArgs {
    fn config(&self) -> SiftConfig {
        SiftConfig {
            sd_threshold: self.sd_threshold,
            max_sift_iterations: self.max_sift_iterations,
            max_imfs: self.max_imfs,
            boundary_policy: match self.boundary {
                BoundaryArg::Mirror => BoundaryPolicy::MirrorExtrema,
                BoundaryArg::Clamp => BoundaryPolicy::ClampEndpoints,
            },
        }
    }
}

#[derive(Args)]
struct MethodArgs {
    #[command(flatten)]
    sift: SiftArgs,
    #[arg(long, default_value_t = 128)]
    frame_length: usize,
    #[arg(long, value_enum, default_value_t = PolicyArg::PerImfMad)]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value_t = ScopeArg::PerFrame)]
    stats_scope: ScopeArg,
    #[arg(long, value_enum, default_value_t = ScaleArg::FrameWidth)]
    scale_length: ScaleArg,
    /// Use sigma instead of sigma^2 in the NormalShrink numerator.
    #[arg(long)]
    paper_verbatim_variance: bool,
    #[arg(long, default_value_t = 256)]
    wiener_frame: usize,
    #[arg(long, default_value_t = 0.5)]
    wiener_overlap: f64,
    /// Frames at the start of the input used to estimate the Wiener noise floor.
    #[arg(long, default_value_t = 6)]
    wiener_noise_frames: usize,
    /// Haar levels; default floor(log2 n) - 4.
    #[arg(long)]
    dwt_levels: Option<usize>,
}

impl MethodArgs {
    fn config(&self) -> MethodConfig {
        MethodConfig {
            denoise: DenoiseConfig {
                frame_length: self.frame_length,
                sift: self.sift.config(),
                noise_sigma_policy: match self.policy {
                    PolicyArg::PerImfMad => NoiseSigmaPolicy::PerImfMad,
                    PolicyArg::GlobalFirstImfMad => NoiseSigmaPolicy::GlobalFirstImfMad,
                },
                paper_verbatim_variance: self.paper_verbatim_variance,
                stats_scope: match self.stats_scope {
                    ScopeArg::PerFrame => StatsScope::PerFrame,
                    ScopeArg::PerImf => StatsScope::PerImf,
                },
                scale_length: match self.scale_length {
                    ScaleArg::FrameWidth => ScaleLength::FrameWidth,
                    ScaleArg::ImfLength => ScaleLength::ImfLength,
                },
                ..DenoiseConfig::default()
            },
            wiener: WienerConfig {
                fft_frame_length: self.wiener_frame,
                overlap_fraction: self.wiener_overlap,
                noise_power: NoisePower::EstimateFromFirstFrames(self.wiener_noise_frames),
            },
            dwt: DwtConfig {
                levels: self.dwt_levels,
                ..DwtConfig::default()
            },
        }
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

#[derive(Serialize)]
struct ImfSummary {
    index: usize,
    sift_count: usize,
    final_sd: f64,
    maxima: usize,
    minima: usize,
    energy: f64,
}

#[derive(Serialize)]
struct DecomposeSummary {
    input: PathBuf,
    samples: usize,
    sample_rate_hz: u32,
    config: SiftConfig,
    num_imfs: usize,
    stop_reason: StopReason,
    imfs: Vec<ImfSummary>,
    residue_energy: f64,
}

fn cmd_decompose(input: &Path, out_dir: &Path, sift: &SiftArgs) -> anyhow::Result<()> {
    let audio = load_wav(input)?;
    let config = sift.config();
    let decomp = decompose(&audio.signal, &config)?;
    create_dir(out_dir)?;

    let mut imfs = Vec::with_capacity(decomp.num_imfs());
    for (k, imf) in decomp.imfs.iter().enumerate() {
        save_signal(imf, out_dir.join(format!("imf_{:02}.wav", k + 1)))?;
        let ext = find_extrema(imf.samples());
        imfs.push(ImfSummary {
            index: k + 1,
            sift_count: decomp.sift_counts[k],
            final_sd: decomp.final_sd[k],
            maxima: ext.maxima.len(),
            minima: ext.minima.len(),
            energy: imf.energy(),
        });
    }
    save_signal(&decomp.residue, out_dir.join("residue.wav"))?;

    write_json(
        &out_dir.join("decomposition.json"),
        &DecomposeSummary {
            input: input.to_path_buf(),
            samples: audio.signal.len(),
            sample_rate_hz: audio.signal.sample_rate_hz(),
            config,
            num_imfs: decomp.num_imfs(),
            stop_reason: decomp.stop_reason,
            imfs,
            residue_energy: decomp.residue.energy(),
        },
    )
}

#[derive(Serialize)]
struct NoiseSummary {
    input: PathBuf,
    output: PathBuf,
    target_snr_db: f64,
    /// Clean over injected noise energy, before 16-bit quantization.
    realized_snr_db: f64,
    seed: u64,
    noise_energy: f64,
    clipped_samples: usize,
}

fn cmd_add_noise(input: &Path, snr: f64, seed: u64, out: &Path, json: Option<&Path>) -> anyhow::Result<()> {
    let audio = load_wav(input)?;
    let (noisy, noise) = add_awgn(&audio.signal, &NoiseSpec { target_input_snr_db: snr, seed })?;
    save_signal(&noisy, out)?;
    let json_path = json.map(Path::to_path_buf).unwrap_or_else(|| out.with_extension("json"));
    write_json(
        &json_path,
        &NoiseSummary {
            input: input.to_path_buf(),
            output: out.to_path_buf(),
            target_snr_db: snr,
            realized_snr_db: 10.0 * (audio.signal.energy() / noise.energy()).log10(),
            seed,
            noise_energy: noise.energy(),
            clipped_samples: noisy.samples().iter().filter(|v| v.abs() > 1.0).count(),
        },
    )
}

#[derive(Serialize)]
struct DenoiseMetrics {
    input: PathBuf,
    output: PathBuf,
    method: Method,
    config: MethodConfig,
    input_snr_db: Option<f64>,
    snr_out_paper: Option<f64>,
    snr_db: Option<f64>,
    num_imfs: Option<usize>,
    noise_sigmas: Option<Vec<f64>>,
    signal_dominant_frames: Option<usize>,
    noise_dominant_frames: Option<usize>,
}

fn cmd_denoise(
    input: &Path,
    method: Method,
    clean: Option<&Path>,
    out: &Path,
    metrics: &Path,
    noise_sigma: Option<f64>,
    args: &MethodArgs,
) -> anyhow::Result<()> {
    let noisy = load_wav(input)?.signal;
    let reference = match clean {
        Some(path) => {
            let c = load_wav(path)?.signal;
            if c.len() != noisy.len() {
                bail!(emdshrink::Error::LengthMismatch { expected: noisy.len(), found: c.len() });
            }
            Some(c)
        }
        None => None,
    };

    let mut config = args.config();
    if let Some(sigma) = noise_sigma {
        config.denoise.noise_sigma_policy = NoiseSigmaPolicy::Known(sigma);
        config.wiener.noise_power = NoisePower::Known(sigma * sigma);
    }
    let output = run_method(method, &noisy, &config)?;
    save_signal(&output.denoised, out)?;

    let score = |f: fn(&[f64], &[f64]) -> emdshrink::Result<f64>, est: &Signal| -> anyhow::Result<Option<f64>> {
        Ok(match &reference {
            Some(c) => Some(f(c.samples(), est.samples())?),
            None => None,
        })
    };
    let trace = output.trace.as_ref();
    write_json(
        metrics,
        &DenoiseMetrics {
            input: input.to_path_buf(),
            output: out.to_path_buf(),
            method,
            config,
            input_snr_db: score(snr_db, &noisy)?,
            snr_out_paper: score(snr_out_paper, &output.denoised)?,
            snr_db: score(snr_db, &output.denoised)?,
            num_imfs: trace.map(|t| t.decomposition.num_imfs()),
            noise_sigmas: trace.map(|t| t.noise_sigmas.clone()),
            signal_dominant_frames: trace.map(|t| t.count(Dominance::SignalDominant)),
            noise_dominant_frames: trace.map(|t| t.count(Dominance::NoiseDominant)),
        },
    )
}

fn load_corpus(dir: &Path) -> anyhow::Result<Vec<(String, Signal)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading corpus {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .wav files in corpus directory {}", dir.display());
    }
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((name, load_wav(&p)?.signal))
        })
        .collect()
}

fn cmd_bench(
    corpus: &Path,
    snrs: Vec<f64>,
    seeds: u64,
    methods: Vec<Method>,
    out_dir: &Path,
    noise_level: NoiseLevelArg,
    args: &MethodArgs,
) -> anyhow::Result<()> {
    let corpus = load_corpus(corpus)?;
    let config = BenchConfig {
        input_snrs_db: snrs,
        seeds,
        methods,
        noise_level: match noise_level {
            NoiseLevelArg::Known => NoiseLevel::Known,
            NoiseLevelArg::Estimated => NoiseLevel::Estimated,
        },
        methods_config: args.config(),
    };
    let report = run_bench(&corpus, &config)?;
    create_dir(out_dir)?;
    fs::write(out_dir.join("report.csv"), report_csv(&report)?)
        .with_context(|| format!("writing {}", out_dir.join("report.csv").display()))?;
    write_json(&out_dir.join("report.json"), &report)?;
    for f in &report.failures {
        eprintln!(
            "trial failed: {} snr={} seed={} method={}: {}",
            f.file,
            f.input_snr_db,
            f.seed,
            f.method.map(|m| m.name()).unwrap_or("-"),
            f.error
        );
    }
    Ok(())
}

fn cmd_make_fixtures(out_dir: &Path) -> anyhow::Result<()> {
    create_dir(out_dir)?;
    for (name, signal) in fixtures::corpus()? {
        save_signal(&signal, out_dir.join(format!("{name}.wav")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Decompose { input, out_dir, sift } => cmd_decompose(&input, &out_dir, &sift),
        Command::AddNoise { input, snr, seed, out, json } => cmd_add_noise(&input, snr, seed, &out, json.as_deref()),
        Command::Denoise {
            input,
            method,
            clean,
            out,
            metrics,
            noise_sigma,
            methods,
        } => cmd_denoise(&input, method, clean.as_deref(), &out, &metrics, noise_sigma, &methods),
        Command::Bench {
            corpus,
            snrs,
            seeds,
            methods,
            out_dir,
            noise_level,
            method_args,
        } => cmd_bench(&corpus, snrs, seeds, methods, &out_dir, noise_level, &method_args),
        Command::MakeFixtures { out_dir } => cmd_make_fixtures(&out_dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // bad parameter values are usage errors; everything else is data
            match e.downcast_ref::<emdshrink::Error>() {
                Some(emdshrink::Error::InvalidConfig(_)) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
