//! Formant frequencies and bandwidths from LPC polynomial roots.

use crate::dsp::{autocorrelation, levinson_durbin, polynomial_roots, pre_emphasis, Window};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormantConfig {
    pub frame: f64,
    pub hop: f64,
    pub pre_emphasis: f64,
    /// `None` selects `2 + fs/1000`.
    pub lpc_order: Option<usize>,
    pub min_freq: f64,
    pub max_freq: f64,
    pub max_bandwidth: f64,
}

impl Default for FormantConfig {
    fn default() -> Self {
        Self {
            frame: 0.025,
            hop: 0.01,
            pre_emphasis: 0.98,
            lpc_order: None,
            min_freq: 90.0,
            max_freq: 7000.0,
            max_bandwidth: 400.0,
        }
    }
}

/// F1-F3 and their bandwidths for one frame, in Hz, ascending by frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormantFrame {
    pub freqs: [f64; 3],
    pub bandwidths: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormantTrack {
    /// Centre sample of each frame.
    pub centres: Vec<usize>,
    /// `None` on unvoiced frames and frames with fewer than three
    /// qualifying poles.
    pub frames: Vec<Option<FormantFrame>>,
}

impl FormantTrack {
    pub fn voiced_mask(&self) -> Vec<bool> {
        self.frames.iter().map(Option::is_some).collect()
    }

    /// Values of formant `k` (0-based) on retained frames.
    pub fn formant(&self, k: usize) -> Vec<f64> {
        self.frames.iter().flatten().map(|f| f.freqs[k]).collect()
    }

    pub fn bandwidth(&self, k: usize) -> Vec<f64> {
        self.frames.iter().flatten().map(|f| f.bandwidths[k]).collect()
    }
}

/// 3 dB bandwidth of a pole of radius `r`: `-(fs/pi) ln r`.
pub fn bandwidth_from_radius(radius: f64, fs: f64) -> f64 {
    -(fs / PI) * radius.ln()
}

/// Qualifying resonances of one pre-emphasized, windowed frame, ascending.
pub fn frame_resonances(frame: &[f64], fs: f64, order: usize, cfg: &FormantConfig) -> Vec<(f64, f64)> {
    let r = autocorrelation(frame, order);
    let Ok(model) = levinson_durbin(&r, order) else {
        return Vec::new();
    };
    let mut found: Vec<(f64, f64)> = polynomial_roots(&model.polynomial())
        .into_iter()
        .filter(|z| z.im > 0.0)
        .map(|z| {
            let freq = z.arg() * fs / (2.0 * PI);
            (freq, bandwidth_from_radius(z.norm(), fs))
        })
        .filter(|&(f, bw)| f > cfg.min_freq && f < cfg.max_freq && bw > 0.0 && bw < cfg.max_bandwidth)
        .collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found
}

/// Frame-wise formant track. `voiced(centre_sample)` gates frames.
pub fn formant_track(
    samples: &[f64],
    fs: f64,
    cfg: &FormantConfig,
    voiced: &dyn Fn(usize) -> bool,
) -> FormantTrack {
    let order = cfg.lpc_order.unwrap_or(2 + (fs / 1000.0).round() as usize);
    let len = (cfg.frame * fs).round() as usize;
    let hop = ((cfg.hop * fs).round() as usize).max(1);
    let mut track = FormantTrack::default();
    if samples.len() < len || len <= order {
        return track;
    }
    let emphasized = pre_emphasis(samples, cfg.pre_emphasis);
    let window = Window::Hamming.coefficients(len);
    let mut start = 0;
    while start + len <= samples.len() {
        let centre = start + len / 2;
        track.centres.push(centre);
        let frame = if voiced(centre) {
            let windowed: Vec<f64> = emphasized[start..start + len]
                .iter()
                .zip(&window)
                .map(|(x, w)| x * w)
                .collect();
            let poles = frame_resonances(&windowed, fs, order, cfg);
            (poles.len() >= 3).then(|| FormantFrame {
                freqs: [poles[0].0, poles[1].0, poles[2].0],
                bandwidths: [poles[0].1, poles[1].1, poles[2].1],
            })
        } else {
            None
        };
        track.frames.push(frame);
        start += hop;
    }
    track
}
