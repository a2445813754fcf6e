use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty signal")]
    EmptySignal,

    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },

    #[error("sample rate must be positive")]
    InvalidSampleRate,

    #[error("cannot define SNR: reference signal has zero energy")]
    ZeroEnergy,

    #[error("length mismatch: expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// Fewer than two spline knots remain after boundary extension.
    #[error("insufficient extrema to build an envelope")]
    InsufficientExtrema,

    #[error("signal too short: need at least {min} samples, got {len}")]
    SignalTooShort { min: usize, len: usize },

    #[error("scale parameter undefined: segment width {frame_length} must exceed IMF count {num_imfs}")]
    ScaleParameterUndefined { frame_length: usize, num_imfs: usize },

    #[error("decomposition has no IMFs")]
    EmptyDecomposition,

    #[error("{levels} DWT levels is too deep for a signal of {len} samples")]
    LevelsTooDeep { levels: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed RIFF/WAVE data at byte {offset}: {reason}")]
    MalformedWav { offset: usize, reason: String },

    #[error("unsupported WAV encoding at byte {offset}: {reason} (only PCM16 is supported)")]
    UnsupportedEncoding { offset: usize, reason: String },
}
