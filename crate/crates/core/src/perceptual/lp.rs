//! Linear-prediction families: LPC, LPCC, LPCT, ACW and PLP.

use super::filterbank::{bark_to_hz, critical_band_curve, equal_loudness, hz_to_bark};
use super::{Family, FeatureFrameMatrix, PerceptualError};
use crate::corpus::Recording;
use crate::dsp::{autocorrelation, dct2, frame_signal, levinson_durbin, lpc_cepstrum, power_spectrum, FrameSpec, LpcModel};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn check_order(order: usize, min: usize) -> Result<(), PerceptualError> {
    if order < min {
        return Err(PerceptualError::InvalidParameter(format!("prediction order {order} below {min}")));
    }
    Ok(())
}

/// LPC model of every non-degenerate frame; silent frames are skipped.
pub fn frame_models(rec: &Recording, frame: &FrameSpec, order: usize) -> Result<Vec<LpcModel>, PerceptualError> {
    let frames = frame_signal(&rec.samples, frame)?;
    Ok(frames
        .iter()
        .filter_map(|f| levinson_durbin(&autocorrelation(f, order), order).ok())
        .collect())
}

/// Predictor coefficients `a[1..=order]` per frame.
pub fn lpc_features(rec: &Recording, frame: &FrameSpec, order: usize) -> Result<FeatureFrameMatrix, PerceptualError> {
    check_order(order, 12)?;
    let values = frame_models(rec, frame, order)?.into_iter().map(|m| m.coefficients).collect();
    FeatureFrameMatrix::new(Family::Lpc, false, values)
}

/// Cepstrum `c[1..=n_coeffs]` of each frame's all-pole model.
pub fn lpcc(rec: &Recording, frame: &FrameSpec, order: usize, n_coeffs: usize) -> Result<FeatureFrameMatrix, PerceptualError> {
    check_order(order, 1)?;
    let values = frame_models(rec, frame, order)?
        .iter()
        .map(|m| lpc_cepstrum(&m.coefficients, n_coeffs))
        .collect();
    FeatureFrameMatrix::new(Family::Lpcc, false, values)
}

/// Orthonormal DCT-II of the predictor vector `a[1..=order]`, first
/// `n_coeffs` terms.
pub fn lpct(rec: &Recording, frame: &FrameSpec, order: usize, n_coeffs: usize) -> Result<FeatureFrameMatrix, PerceptualError> {
    check_order(order, 1)?;
    if n_coeffs > order {
        return Err(PerceptualError::InvalidParameter(format!(
            "LPCT has at most {order} coefficients, {n_coeffs} requested"
        )));
    }
    let values = frame_models(rec, frame, order)?
        .iter()
        .map(|m| dct2(&m.coefficients, n_coeffs))
        .collect();
    FeatureFrameMatrix::new(Family::Lpct, false, values)
}

/// Adaptive component weighted cepstrum of the predictor `a`.
///
/// Setting every residue of `1/A(z)` to one gives `N(z)/A(z)` with
/// `N(z) = sum_k (p-k)/p a[k] z^-k` (up to the constant `p`), so no root
/// finding is needed: the result is `cep(1/A) - cep(1/N)`.
pub fn acw_cepstrum(a: &[f64], n_coeffs: usize) -> Vec<f64> {
    let p = a.len();
    let numerator: Vec<f64> = a[..p.saturating_sub(1)]
        .iter()
        .enumerate()
        .map(|(i, &ak)| (p - i - 1) as f64 / p as f64 * ak)
        .collect();
    let pole = lpc_cepstrum(a, n_coeffs);
    let zero = lpc_cepstrum(&numerator, n_coeffs);
    pole.iter().zip(&zero).map(|(c, z)| c - z).collect()
}

pub fn acw(rec: &Recording, frame: &FrameSpec, order: usize, n_coeffs: usize) -> Result<FeatureFrameMatrix, PerceptualError> {
    check_order(order, 1)?;
    let values = frame_models(rec, frame, order)?
        .iter()
        .map(|m| acw_cepstrum(&m.coefficients, n_coeffs))
        .collect();
    FeatureFrameMatrix::new(Family::Acw, false, values)
}

/// Frequency axis of the auditory spectrum in PLP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlpWarping {
    /// Critical bands spaced about one Bark apart.
    Bark,
    /// Every FFT bin is its own band.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlpConfig {
    pub order: usize,
    pub n_coeffs: usize,
    pub warping: PlpWarping,
    pub equal_loudness: bool,
    /// Intensity-to-loudness exponent; 1 disables compression.
    pub compression: f64,
}

impl Default for PlpConfig {
    fn default() -> Self {
        Self {
            order: 12,
            n_coeffs: 20,
            warping: PlpWarping::Bark,
            equal_loudness: true,
            compression: 1.0 / 3.0,
        }
    }
}

/// Auditory spectrum samples (equally spaced from 0 to Nyquist on the
/// warped axis) of one frame's one-sided power spectrum.
fn auditory_spectrum(power: &[f64], fs: f64, cfg: &PlpConfig) -> Vec<f64> {
    let nfft = 2 * (power.len() - 1);
    let bin_hz = fs / nfft as f64;
    let (mut bands, centres): (Vec<f64>, Vec<f64>) = match cfg.warping {
        PlpWarping::Identity => (power.to_vec(), (0..power.len()).map(|k| k as f64 * bin_hz).collect()),
        PlpWarping::Bark => {
            let z_max = hz_to_bark(fs / 2.0);
            let intervals = z_max.ceil() as usize;
            let dz = z_max / intervals as f64;
            let bin_bark: Vec<f64> = (0..power.len()).map(|k| hz_to_bark(k as f64 * bin_hz)).collect();
            let centres_z: Vec<f64> = (0..=intervals).map(|i| i as f64 * dz).collect();
            let mut bands: Vec<f64> = centres_z
                .iter()
                .map(|&z| power.iter().zip(&bin_bark).map(|(p, &b)| p * critical_band_curve(b - z)).sum())
                .collect();
            // Edge bands fall outside the usable range; copy their neighbours.
            let m = bands.len();
            bands[0] = bands[1];
            bands[m - 1] = bands[m - 2];
            (bands, centres_z.into_iter().map(bark_to_hz).collect())
        }
    };
    if cfg.equal_loudness {
        let m = bands.len();
        for (i, b) in bands.iter_mut().enumerate() {
            // The curve vanishes at 0 Hz; use the neighbouring centre there.
            let f = if i == 0 && m > 1 { centres[1] } else { centres[i] };
            *b *= equal_loudness(f);
        }
    }
    if cfg.compression != 1.0 {
        for b in bands.iter_mut() {
            *b = b.powf(cfg.compression);
        }
    }
    bands
}

/// Autocorrelation `r[0..=order]` of a real, even spectrum sampled at `M`
/// points from 0 to Nyquist (inverse DFT of its symmetric extension).
fn spectrum_autocorrelation(v: &[f64], order: usize) -> Vec<f64> {
    let m = v.len() - 1;
    (0..=order)
        .map(|lag| {
            let sign = if lag % 2 == 0 { 1.0 } else { -1.0 };
            let inner: f64 = (1..m)
                .map(|i| v[i] * (PI * (i * lag) as f64 / m as f64).cos())
                .sum();
            v[0] + sign * v[m] + 2.0 * inner
        })
        .collect()
}

/// Perceptual linear prediction cepstra `c[1..=n_coeffs]` per frame.
pub fn plp(rec: &Recording, frame: &FrameSpec, cfg: &PlpConfig) -> Result<FeatureFrameMatrix, PerceptualError> {
    check_order(cfg.order, 5)?;
    if !(cfg.compression > 0.0) {
        return Err(PerceptualError::InvalidParameter("compression exponent must be positive".into()));
    }
    let fs = rec.sample_rate as f64;
    // Twice the frame FFT size so the identity warping has no circular
    // aliasing in its autocorrelation.
    let nfft = 2 * frame.nfft();
    let values = frame_signal(&rec.samples, frame)?
        .iter()
        .filter_map(|f| {
            let aud = auditory_spectrum(&power_spectrum(f, nfft), fs, cfg);
            let r = spectrum_autocorrelation(&aud, cfg.order);
            levinson_durbin(&r, cfg.order).ok()
        })
        .map(|m| lpc_cepstrum(&m.coefficients, cfg.n_coeffs))
        .collect();
    FeatureFrameMatrix::new(Family::Plp, false, values)
}
