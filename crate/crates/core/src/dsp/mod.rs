//! Shared signal primitives: framing, windows, spectra, autocorrelation,
//! linear prediction and cepstra.
//!
//! All functions are pure and reentrant. Samples are `f64` throughout.

mod band;
mod lpc;
mod roots;
mod spectrum;

pub use band::SignalSpectrum;
pub(crate) use band::{cosine_low_pass, hann_band};
pub use lpc::{cepstrum_from_lpc, levinson_durbin, lpc_cepstrum, LpcModel};
pub use roots::polynomial_roots;
pub use spectrum::{
    autocorrelation, dct2, fft_forward, fft_inverse, idct2, next_pow2, power_spectrum,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("signal of {len} samples is shorter than one {frame_len}-sample frame")]
    SignalTooShort { len: usize, frame_len: usize },
    #[error("invalid frame geometry: frame_len {frame_len}, hop {hop}")]
    InvalidFrameSpec { frame_len: usize, hop: usize },
    #[error("degenerate frame: zero energy")]
    DegenerateFrame,
    #[error("prediction order {order} needs {needed} autocorrelation lags, got {got}")]
    OrderTooHigh {
        order: usize,
        needed: usize,
        got: usize,
    },
    #[error("prediction gain is zero")]
    ZeroGain,
}

/// Analysis window shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Hamming,
    Hann,
    Rectangular,
}

impl Window {
    /// Symmetric window of `len` points.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        if len == 1 {
            return vec![1.0];
        }
        let denom = (len - 1) as f64;
        (0..len)
            .map(|n| {
                let phase = 2.0 * PI * n as f64 / denom;
                match self {
                    Window::Hamming => 0.54 - 0.46 * phase.cos(),
                    Window::Hann => 0.5 - 0.5 * phase.cos(),
                    Window::Rectangular => 1.0,
                }
            })
            .collect()
    }
}

/// Frame geometry in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub frame_len: usize,
    pub hop: usize,
    pub window: Window,
}

impl Default for FrameSpec {
    /// 25 ms Hamming frames with a 10 ms hop at 16 kHz.
    fn default() -> Self {
        Self {
            frame_len: 400,
            hop: 160,
            window: Window::Hamming,
        }
    }
}

impl FrameSpec {
    pub fn new(frame_len: usize, hop: usize, window: Window) -> Result<Self, DspError> {
        if frame_len == 0 || hop == 0 || hop > frame_len {
            return Err(DspError::InvalidFrameSpec { frame_len, hop });
        }
        Ok(Self {
            frame_len,
            hop,
            window,
        })
    }

    pub fn from_millis(
        frame_ms: f64,
        hop_ms: f64,
        sample_rate: u32,
        window: Window,
    ) -> Result<Self, DspError> {
        let to_samples = |ms: f64| (ms * sample_rate as f64 / 1000.0).round() as usize;
        Self::new(to_samples(frame_ms), to_samples(hop_ms), window)
    }

    /// Number of whole frames that fit in `n` samples.
    pub fn frame_count(&self, n: usize) -> usize {
        if n < self.frame_len {
            0
        } else {
            (n - self.frame_len) / self.hop + 1
        }
    }

    /// FFT length used for spectra of these frames.
    pub fn nfft(&self) -> usize {
        next_pow2(self.frame_len)
    }

    fn validate(&self) -> Result<(), DspError> {
        if self.frame_len == 0 || self.hop == 0 || self.hop > self.frame_len {
            return Err(DspError::InvalidFrameSpec {
                frame_len: self.frame_len,
                hop: self.hop,
            });
        }
        Ok(())
    }
}

/// Cut `samples` into overlapping windowed frames.
///
/// Frame count is `floor((N - frame_len) / hop) + 1`; trailing samples that do
/// not fill a frame are discarded.
pub fn frame_signal(samples: &[f64], spec: &FrameSpec) -> Result<Vec<Vec<f64>>, DspError> {
    spec.validate()?;
    if samples.len() < spec.frame_len {
        return Err(DspError::SignalTooShort {
            len: samples.len(),
            frame_len: spec.frame_len,
        });
    }
    let window = spec.window.coefficients(spec.frame_len);
    let frames = (0..spec.frame_count(samples.len()))
        .map(|i| {
            let start = i * spec.hop;
            samples[start..start + spec.frame_len]
                .iter()
                .zip(&window)
                .map(|(x, w)| x * w)
                .collect()
        })
        .collect();
    Ok(frames)
}

/// First-order pre-emphasis `y[n] = x[n] - coeff * x[n-1]`.
pub fn pre_emphasis(samples: &[f64], coeff: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = 0.0;
    for &x in samples {
        out.push(x - coeff * prev);
        prev = x;
    }
    out
}

pub fn energy(samples: &[f64]) -> f64 {
    samples.iter().map(|x| x * x).sum()
}
