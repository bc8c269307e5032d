//! Amplitude-modulation families: modulation spectra (MSC) and an
//! envelope-based inferior-colliculus model (ICC).

use super::{Family, FeatureFrameMatrix, PerceptualError};
use crate::corpus::Recording;
use crate::dsp::{cosine_low_pass, hann_band, SignalSpectrum};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Overlapping Hann bands: band `b` spans log-spaced edges `b` to `b + 2`.
fn acoustic_bands(f_lo: f64, f_hi: f64, n: usize) -> Vec<(f64, f64)> {
    let ratio = (f_hi / f_lo).powf(1.0 / (n + 1) as f64);
    let edges: Vec<f64> = (0..n + 2).map(|i| f_lo * ratio.powi(i as i32)).collect();
    (0..n).map(|b| (edges[b], edges[b + 2])).collect()
}

fn check_duration(rec: &Recording, needed: f64) -> Result<(), PerceptualError> {
    if rec.duration() + 1e-12 < needed {
        return Err(PerceptualError::TooShort {
            duration: rec.duration(),
            needed,
        });
    }
    Ok(())
}

/// Segment starts of length `len` with `hop`; a signal shorter than one
/// segment yields a single segment covering all of it.
fn segments(total: usize, len: usize, hop: usize) -> Vec<(usize, usize)> {
    if total <= len {
        return vec![(0, total)];
    }
    (0..=(total - len) / hop).map(|i| (i * hop, len)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MscConfig {
    pub n_acoustic_bands: usize,
    pub f_lo: f64,
    pub f_hi: f64,
    /// Envelope sampling rate after block averaging, Hz.
    pub envelope_rate: f64,
    /// Analysis segment and hop, seconds.
    pub segment: f64,
    pub hop: f64,
    pub n_mod_bands: usize,
    pub mod_lo: f64,
    pub mod_hi: f64,
    pub min_duration: f64,
}

impl Default for MscConfig {
    fn default() -> Self {
        Self {
            n_acoustic_bands: 8,
            f_lo: 100.0,
            f_hi: 7000.0,
            envelope_rate: 100.0,
            segment: 1.0,
            hop: 0.5,
            n_mod_bands: 15,
            mod_lo: 2.0,
            mod_hi: 20.0,
            min_duration: 0.5,
        }
    }
}

/// Modulation spectrum per segment: for each of `n_mod_bands` equal-width
/// bands between `mod_lo` and `mod_hi`, the envelope power summed over
/// acoustic bands relative to their summed squared mean envelope.
///
/// The DFT of each segment is unwindowed, so a modulation with a whole
/// number of cycles per segment falls on a single bin.
pub fn msc(rec: &Recording, cfg: &MscConfig) -> Result<FeatureFrameMatrix, PerceptualError> {
    check_duration(rec, cfg.min_duration)?;
    let fs = rec.sample_rate as f64;
    if cfg.mod_hi * 2.0 >= cfg.envelope_rate || cfg.n_mod_bands == 0 || cfg.mod_lo >= cfg.mod_hi {
        return Err(PerceptualError::InvalidParameter("modulation bands outside the envelope rate".into()));
    }
    let spectrum = SignalSpectrum::new(&rec.samples, fs);
    let block = (fs / cfg.envelope_rate).round() as usize;
    let rate = fs / block as f64;
    let envelopes: Vec<Vec<f64>> = acoustic_bands(cfg.f_lo, cfg.f_hi.min(fs / 2.0), cfg.n_acoustic_bands)
        .into_iter()
        .map(|(lo, hi)| {
            spectrum
                .envelope(|f| hann_band(f, lo, hi))
                .chunks_exact(block)
                .map(|c| c.iter().sum::<f64>() / block as f64)
                .collect()
        })
        .collect();
    let total = envelopes[0].len();
    let seg_len = (cfg.segment * rate).round() as usize;
    let hop = ((cfg.hop * rate).round() as usize).max(1);
    let width = (cfg.mod_hi - cfg.mod_lo) / cfg.n_mod_bands as f64;

    let values = segments(total, seg_len, hop)
        .into_iter()
        .map(|(start, len)| {
            let mut band_power = vec![0.0; cfg.n_mod_bands];
            let mut dc_power = 0.0;
            for env in &envelopes {
                let seg = &env[start..start + len];
                let mean = seg.iter().sum::<f64>() / len as f64;
                dc_power += mean * mean;
                for k in 1..len.div_ceil(2) {
                    let freq = k as f64 * rate / len as f64;
                    if freq < cfg.mod_lo || freq > cfg.mod_hi {
                        continue;
                    }
                    let q = (((freq - cfg.mod_lo) / width) as usize).min(cfg.n_mod_bands - 1);
                    let (mut re, mut im) = (0.0, 0.0);
                    for (n, &e) in seg.iter().enumerate() {
                        let phase = 2.0 * PI * (k * n) as f64 / len as f64;
                        re += (e - mean) * phase.cos();
                        im -= (e - mean) * phase.sin();
                    }
                    band_power[q] += 2.0 * (re * re + im * im) / (len * len) as f64;
                }
            }
            if dc_power > 0.0 {
                band_power.iter().map(|p| p / dc_power).collect()
            } else {
                vec![0.0; cfg.n_mod_bands]
            }
        })
        .collect();
    FeatureFrameMatrix::new(Family::Msc, false, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IccConfig {
    pub n_cochlear_bands: usize,
    pub f_lo: f64,
    pub f_hi: f64,
    /// Envelope low-pass cutoff, Hz.
    pub envelope_cutoff: f64,
    pub envelope_rate: f64,
    pub n_channels: usize,
    /// Best-modulation frequencies are log-spaced over this range, Hz.
    pub bmf_lo: f64,
    pub bmf_hi: f64,
    /// Standard deviation of each modulation filter's Gaussian gain on a
    /// log2 frequency axis, octaves.
    pub bandwidth_octaves: f64,
    pub segment: f64,
    pub hop: f64,
    pub min_duration: f64,
}

impl Default for IccConfig {
    fn default() -> Self {
        Self {
            n_cochlear_bands: 8,
            f_lo: 100.0,
            f_hi: 7000.0,
            envelope_cutoff: 400.0,
            envelope_rate: 1000.0,
            n_channels: 16,
            bmf_lo: 2.0,
            bmf_hi: 300.0,
            bandwidth_octaves: 0.5,
            segment: 0.5,
            hop: 0.25,
            min_duration: 0.5,
        }
    }
}

/// Energy added inside the logarithm; silence maps to `ln(ICC_FLOOR)`.
pub const ICC_FLOOR: f64 = 1e-12;

impl IccConfig {
    pub fn best_modulation_frequencies(&self) -> Vec<f64> {
        if self.n_channels == 1 {
            return vec![self.bmf_lo];
        }
        let ratio = (self.bmf_hi / self.bmf_lo).powf(1.0 / (self.n_channels - 1) as f64);
        (0..self.n_channels).map(|i| self.bmf_lo * ratio.powi(i as i32)).collect()
    }
}

/// Inferior-colliculus style modulation energies per segment.
///
/// Each cochlear band is rectified (both half-waves, so the result does not
/// depend on polarity), low-passed and decimated to the envelope rate; the
/// envelope minus its mean passes through a bank of modulation band-pass
/// filters. Channel outputs are the log of the energy summed over bands.
pub fn icc(rec: &Recording, cfg: &IccConfig) -> Result<FeatureFrameMatrix, PerceptualError> {
    check_duration(rec, cfg.min_duration)?;
    let fs = rec.sample_rate as f64;
    let bmfs = cfg.best_modulation_frequencies();
    if cfg.bmf_hi >= cfg.envelope_rate / 2.0 || cfg.envelope_cutoff >= cfg.envelope_rate / 2.0 {
        return Err(PerceptualError::InvalidParameter("modulation range above envelope Nyquist".into()));
    }
    let spectrum = SignalSpectrum::new(&rec.samples, fs);
    let step = (fs / cfg.envelope_rate).round() as usize;
    let rate = fs / step as f64;
    let sigma = cfg.bandwidth_octaves;
    let mut channel_signals: Vec<Vec<Vec<f64>>> = vec![Vec::new(); bmfs.len()];
    for (lo, hi) in acoustic_bands(cfg.f_lo, cfg.f_hi.min(fs / 2.0), cfg.n_cochlear_bands) {
        let rectified: Vec<f64> = spectrum.filtered(|f| hann_band(f, lo, hi)).iter().map(|v| v.abs()).collect();
        let smooth = SignalSpectrum::new(&rectified, fs).filtered(|f| cosine_low_pass(f, cfg.envelope_cutoff));
        let mut env: Vec<f64> = smooth.iter().step_by(step).copied().collect();
        let mean = env.iter().sum::<f64>() / env.len() as f64;
        env.iter_mut().for_each(|v| *v -= mean);
        let env_spectrum = SignalSpectrum::new(&env, rate);
        for (c, &bmf) in bmfs.iter().enumerate() {
            channel_signals[c].push(env_spectrum.filtered(|f| {
                if f <= 0.0 {
                    0.0
                } else {
                    (-(f / bmf).log2().powi(2) / (2.0 * sigma * sigma)).exp()
                }
            }));
        }
    }
    let total = channel_signals[0][0].len();
    let seg_len = (cfg.segment * rate).round() as usize;
    let hop = ((cfg.hop * rate).round() as usize).max(1);
    let values = segments(total, seg_len, hop)
        .into_iter()
        .map(|(start, len)| {
            channel_signals
                .iter()
                .map(|bands| {
                    let energy: f64 = bands
                        .iter()
                        .map(|s| s[start..start + len].iter().map(|v| v * v).sum::<f64>() / len as f64)
                        .sum();
                    (energy + ICC_FLOOR).ln()
                })
                .collect()
        })
        .collect();
    FeatureFrameMatrix::new(Family::Icc, false, values)
}
