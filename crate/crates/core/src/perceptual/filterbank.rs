//! Triangular filterbanks on mel or linear frequency axes, and the
//! equal-loudness weighting shared by PLP and loudness-adjusted MFCC.

use super::PerceptualError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyScale {
    Mel,
    Linear,
}

impl FrequencyScale {
    fn warp(self, hz: f64) -> f64 {
        match self {
            FrequencyScale::Mel => hz_to_mel(hz),
            FrequencyScale::Linear => hz,
        }
    }

    fn unwarp(self, v: f64) -> f64 {
        match self {
            FrequencyScale::Mel => mel_to_hz(v),
            FrequencyScale::Linear => v,
        }
    }
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterbankSpec {
    pub n_filters: usize,
    pub scale: FrequencyScale,
    pub f_min: f64,
    pub f_max: f64,
}

impl Default for FilterbankSpec {
    fn default() -> Self {
        Self {
            n_filters: 26,
            scale: FrequencyScale::Mel,
            f_min: 0.0,
            f_max: 8000.0,
        }
    }
}

impl FilterbankSpec {
    pub fn linear(self) -> Self {
        Self {
            scale: FrequencyScale::Linear,
            ..self
        }
    }

    /// Checks the band edges against `sample_rate` and the filter count
    /// against the number of cepstral coefficients requested (c0 excluded).
    pub fn validate(&self, sample_rate: f64, n_coeffs: usize) -> Result<(), PerceptualError> {
        let bad = |reason: String| Err(PerceptualError::InvalidFilterbank(reason));
        if !(self.f_min >= 0.0 && self.f_min < self.f_max) {
            return bad(format!("f_min {} must be below f_max {}", self.f_min, self.f_max));
        }
        if self.f_max > sample_rate / 2.0 + 1e-9 {
            return bad(format!("f_max {} exceeds Nyquist {}", self.f_max, sample_rate / 2.0));
        }
        if self.n_filters <= n_coeffs {
            return bad(format!(
                "{} filters cannot yield {} coefficients beyond c0",
                self.n_filters, n_coeffs
            ));
        }
        Ok(())
    }

    /// Corner frequencies (Hz): `n_filters + 2` points equally spaced on the
    /// warped axis. Filter `b` rises over `[edges[b], edges[b+1]]` and falls
    /// over `[edges[b+1], edges[b+2]]`.
    pub fn edges(&self) -> Vec<f64> {
        let lo = self.scale.warp(self.f_min);
        let hi = self.scale.warp(self.f_max);
        let step = (hi - lo) / (self.n_filters + 1) as f64;
        (0..self.n_filters + 2)
            .map(|i| self.scale.unwarp(lo + step * i as f64))
            .collect()
    }

    pub fn centres(&self) -> Vec<f64> {
        let e = self.edges();
        e[1..=self.n_filters].to_vec()
    }

    /// Sparse filter weights over the one-sided bins of an `nfft` spectrum.
    pub fn weights(&self, nfft: usize, sample_rate: f64) -> Vec<Vec<(usize, f64)>> {
        let edges = self.edges();
        let bin_hz = sample_rate / nfft as f64;
        (0..self.n_filters)
            .map(|b| {
                let (lo, c, hi) = (edges[b], edges[b + 1], edges[b + 2]);
                (0..=nfft / 2)
                    .filter_map(|k| {
                        let f = k as f64 * bin_hz;
                        let w = if f > lo && f <= c {
                            (f - lo) / (c - lo)
                        } else if f > c && f < hi {
                            (hi - f) / (hi - c)
                        } else {
                            0.0
                        };
                        (w > 0.0).then_some((k, w))
                    })
                    .collect()
            })
            .collect()
    }
}

fn equal_loudness_raw(hz: f64) -> f64 {
    let w2 = (2.0 * PI * hz).powi(2);
    (w2 + 56.8e6) * w2 * w2 / ((w2 + 6.3e6).powi(2) * (w2 + 0.38e9))
}

/// Equal-loudness pre-emphasis curve of perceptual linear prediction,
/// scaled to 1 at 1 kHz.
pub fn equal_loudness(hz: f64) -> f64 {
    equal_loudness_raw(hz) / equal_loudness_raw(1000.0)
}

/// Bark warping `6 asinh(f / 600)`.
pub fn hz_to_bark(hz: f64) -> f64 {
    6.0 * (hz / 600.0).asinh()
}

pub fn bark_to_hz(bark: f64) -> f64 {
    600.0 * (bark / 6.0).sinh()
}

/// Critical-band masking curve as a function of Bark distance from the
/// band centre.
pub fn critical_band_curve(dz: f64) -> f64 {
    if dz < -1.3 || dz > 2.5 {
        0.0
    } else if dz < -0.5 {
        10f64.powf(2.5 * (dz + 0.5))
    } else if dz <= 0.5 {
        1.0
    } else {
        10f64.powf(-(dz - 0.5))
    }
}
