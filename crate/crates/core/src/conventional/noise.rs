//! Harmonic-to-noise ratio and glottal-to-noise excitation ratio.

use super::pitch::{Analysis, PitchTrack};
use crate::dsp::{autocorrelation, hann_band, levinson_durbin, SignalSpectrum, Window};
use serde::{Deserialize, Serialize};

/// HNR in dB from a normalized periodicity correlation `r`.
///
/// `r` is clamped to `[1e-6, 1 - 1e-9]`, bounding the result to roughly
/// `[-60, 90]` dB.
pub fn hnr_from_correlation(r: f64) -> f64 {
    let r = r.clamp(1e-6, 1.0 - 1e-9);
    10.0 * (r / (1.0 - r)).log10()
}

/// HNR per voiced frame from the refined pitch correlation.
pub(crate) fn hnr_track(track: &PitchTrack) -> Vec<f64> {
    track
        .lags
        .iter()
        .zip(&track.strengths)
        .filter(|(lag, _)| lag.is_some())
        .map(|(_, &r)| hnr_from_correlation(r))
        .collect()
}

/// HNR per frame with a caller-imposed period, ignoring voicing decisions.
///
/// Frames are `window` seconds long with `hop` seconds spacing; the lag is
/// refined within one sample of `period` (samples).
pub fn hnr_at_period(samples: &[f64], fs: f64, period: f64, window: f64, hop: f64) -> Vec<f64> {
    let an = Analysis::new(samples, fs);
    let win = (window * fs).round() as usize;
    let hop = ((hop * fs).round() as usize).max(1);
    let coarse = period.round() as usize;
    let span = win + coarse + 2;
    if samples.len() < span {
        return Vec::new();
    }
    (0..=(samples.len() - span) / hop)
        .filter_map(|i| an.refine_lag(i * hop, win, coarse))
        .map(|(_, r)| hnr_from_correlation(r))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GneConfig {
    pub lpc_order: usize,
    /// Analysis window, seconds.
    pub window: f64,
    pub hop: f64,
    pub bandwidth: f64,
    pub band_step: f64,
    pub first_centre: f64,
    pub last_centre: f64,
    /// Minimum centre-frequency distance for a band pair to be compared.
    pub min_separation: f64,
    /// Envelope cross-correlation lags searched, in decimated samples.
    pub max_lag: usize,
}

impl Default for GneConfig {
    fn default() -> Self {
        Self {
            lpc_order: 13,
            window: 0.04,
            hop: 0.01,
            bandwidth: 1000.0,
            band_step: 300.0,
            first_centre: 500.0,
            last_centre: 4000.0,
            min_separation: 500.0,
            max_lag: 1,
        }
    }
}

/// Block-wise LPC inverse filtering. Each hop-sized block uses predictor
/// coefficients from a Hann-windowed analysis window centred on it;
/// silent blocks give a zero residual.
fn inverse_filter(x: &[f64], fs: f64, cfg: &GneConfig) -> Vec<f64> {
    let win = (cfg.window * fs).round() as usize;
    let hop = ((cfg.hop * fs).round() as usize).max(1);
    let taper = Window::Hann.coefficients(win);
    let mut residual = vec![0.0; x.len()];
    let mut block = 0;
    while block < x.len() {
        let end = (block + hop).min(x.len());
        let centre = (block + end) / 2;
        let lo = centre.saturating_sub(win / 2).min(x.len().saturating_sub(win));
        let hi = (lo + win).min(x.len());
        let frame: Vec<f64> = x[lo..hi].iter().zip(&taper).map(|(v, w)| v * w).collect();
        if frame.len() > cfg.lpc_order {
            let r = autocorrelation(&frame, cfg.lpc_order);
            if let Ok(model) = levinson_durbin(&r, cfg.lpc_order) {
                for n in block..end {
                    let mut e = x[n];
                    for (k, &a) in model.coefficients.iter().enumerate() {
                        if n > k {
                            e += a * x[n - k - 1];
                        }
                    }
                    residual[n] = e;
                }
            }
        }
        block = end;
    }
    residual
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa > 0.0 && sbb > 0.0 {
        sab / (saa * sbb).sqrt()
    } else {
        0.0
    }
}

/// GNE value and centre sample for every analysis window, without voicing
/// gating. Values lie in `[0, 1]`.
pub fn gne_windows(x: &[f64], fs: f64, cfg: &GneConfig) -> Vec<(usize, f64)> {
    let residual = inverse_filter(x, fs, cfg);
    let spectrum = SignalSpectrum::new(&residual, fs);
    // Power of two so that the decimated length divides the FFT size.
    let ratio = (fs / (1.2 * cfg.bandwidth)).floor().max(1.0) as usize;
    let decim = 1usize << (usize::BITS - 1 - ratio.leading_zeros());
    let mut centres = Vec::new();
    let mut c = cfg.first_centre;
    while c <= cfg.last_centre + 1e-9 && c + cfg.bandwidth / 2.0 < fs / 2.0 {
        centres.push(c);
        c += cfg.band_step;
    }
    let envelopes: Vec<Vec<f64>> = centres
        .iter()
        .map(|&c| {
            let (lo, hi) = (c - cfg.bandwidth / 2.0, c + cfg.bandwidth / 2.0);
            spectrum.band_envelope_decimated(lo, hi, decim, |f| hann_band(f, lo, hi))
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..centres.len())
        .flat_map(|i| (i + 1..centres.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| centres[j] - centres[i] >= cfg.min_separation - 1e-9)
        .collect();

    let env_len = envelopes.first().map_or(0, Vec::len);
    let win = ((cfg.window * fs) / decim as f64).round() as usize;
    let hop = (((cfg.hop * fs) / decim as f64).round() as usize).max(1);
    let lag = cfg.max_lag;
    if env_len < win + 2 * lag || pairs.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut start = lag;
    while start + win + lag <= env_len {
        let mut best = 0.0f64;
        for &(i, j) in &pairs {
            let a = &envelopes[i][start..start + win];
            for shift in 0..=2 * lag {
                let s = start + shift - lag;
                best = best.max(pearson(a, &envelopes[j][s..s + win]));
            }
        }
        out.push(((start + win / 2) * decim, best.clamp(0.0, 1.0)));
        start += hop;
    }
    out
}
