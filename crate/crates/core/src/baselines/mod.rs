//! Reference denoisers: a short-time spectral Wiener filter and
//! universal-threshold Haar wavelet shrinkage (soft and hard).

mod dwt;
mod wiener;

pub use dwt::{dwt_forward, dwt_inverse, universal_dwt_denoise, DwtConfig, HaarPyramid, Wavelet};
pub use wiener::{wiener_denoise, wiener_gain, NoisePower, WienerConfig, WINDOW_DESCRIPTION};
