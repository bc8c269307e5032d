//! Filterbank cepstra: MFCC, LFCC, cepstral mean subtraction and
//! equal-loudness MFCC.

use super::filterbank::{equal_loudness, FilterbankSpec, FrequencyScale};
use super::{Family, FeatureFrameMatrix, PerceptualError};
use crate::corpus::Recording;
use crate::dsp::{dct2, frame_signal, power_spectrum, FrameSpec};

/// Band energies below `LOG_FLOOR` times the frame's largest band energy are
/// clamped before the logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

/// Cepstrum `c[1..=n_coeffs]` of one frame's band energies: floored log
/// followed by an orthonormal DCT-II, with `c[0]` dropped.
pub fn cepstra_from_band_energies(energies: &[f64], n_coeffs: usize) -> Vec<f64> {
    let peak = energies.iter().copied().fold(0.0, f64::max);
    let floor = (LOG_FLOOR * peak).max(f64::MIN_POSITIVE);
    let logs: Vec<f64> = energies.iter().map(|&e| e.max(floor).ln()).collect();
    dct2(&logs, n_coeffs + 1).split_off(1)
}

/// Shared filterbank-cepstrum path. `weight(centre_hz)` scales each band
/// energy before the logarithm.
pub fn filterbank_cepstra(
    rec: &Recording,
    frame: &FrameSpec,
    fb: &FilterbankSpec,
    n_coeffs: usize,
    weight: &dyn Fn(f64) -> f64,
) -> Result<Vec<Vec<f64>>, PerceptualError> {
    let fs = rec.sample_rate as f64;
    fb.validate(fs, n_coeffs)?;
    let frames = frame_signal(&rec.samples, frame)?;
    let nfft = frame.nfft();
    let filters = fb.weights(nfft, fs);
    let gains: Vec<f64> = fb.centres().into_iter().map(weight).collect();
    Ok(frames
        .iter()
        .map(|f| {
            let power = power_spectrum(f, nfft);
            let energies: Vec<f64> = filters
                .iter()
                .zip(&gains)
                .map(|(taps, g)| g * taps.iter().map(|&(k, w)| w * power[k]).sum::<f64>())
                .collect();
            cepstra_from_band_energies(&energies, n_coeffs)
        })
        .collect())
}

fn require_scale(fb: &FilterbankSpec, scale: FrequencyScale) -> Result<(), PerceptualError> {
    if fb.scale == scale {
        Ok(())
    } else {
        Err(PerceptualError::InvalidFilterbank(format!("expected a {scale:?} filterbank")))
    }
}

pub fn mfcc(rec: &Recording, frame: &FrameSpec, fb: &FilterbankSpec, n_coeffs: usize) -> Result<FeatureFrameMatrix, PerceptualError> {
    require_scale(fb, FrequencyScale::Mel)?;
    FeatureFrameMatrix::new(Family::Mfcc, false, filterbank_cepstra(rec, frame, fb, n_coeffs, &|_| 1.0)?)
}

pub fn lfcc(rec: &Recording, frame: &FrameSpec, fb: &FilterbankSpec, n_coeffs: usize) -> Result<FeatureFrameMatrix, PerceptualError> {
    require_scale(fb, FrequencyScale::Linear)?;
    FeatureFrameMatrix::new(Family::Lfcc, false, filterbank_cepstra(rec, frame, fb, n_coeffs, &|_| 1.0)?)
}

/// MFCC with mel band energies weighted by [`equal_loudness`] at each band
/// centre.
pub fn mfcc_equal_loudness(
    rec: &Recording,
    frame: &FrameSpec,
    fb: &FilterbankSpec,
    n_coeffs: usize,
) -> Result<FeatureFrameMatrix, PerceptualError> {
    require_scale(fb, FrequencyScale::Mel)?;
    FeatureFrameMatrix::new(
        Family::MfccEql,
        false,
        filterbank_cepstra(rec, frame, fb, n_coeffs, &equal_loudness)?,
    )
}

/// Subtract each coefficient's mean over frames.
pub fn cms(cepstra: &FeatureFrameMatrix) -> Result<FeatureFrameMatrix, PerceptualError> {
    let n = cepstra.n_frames() as f64;
    let means: Vec<f64> = (0..cepstra.n_coeffs())
        .map(|j| cepstra.values.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let values = cepstra
        .values
        .iter()
        .map(|r| r.iter().zip(&means).map(|(v, m)| v - m).collect())
        .collect();
    FeatureFrameMatrix::new(Family::Cms, cepstra.delta, values)
}
