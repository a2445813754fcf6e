//! Speech denoising by empirical mode decomposition with frame-wise
//! NormalShrink thresholding, plus wavelet and Wiener reference denoisers.

pub mod baselines;
pub mod bench;
pub mod emd;
pub mod error;
pub mod fixtures;
pub mod io_wav;
pub mod pipeline;
pub mod shrinkage;
pub mod signal;

pub use error::{Error, Result};
pub use signal::Signal;
