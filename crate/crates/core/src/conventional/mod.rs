//! Clinically interpretable voice measures: F0, jitter, shimmer, TKEO, HNR,
//! GNE, formants and vowel-space metrics.

mod formants;
mod noise;
mod perturbation;
mod pitch;
mod vowel_space;

pub use formants::{
    bandwidth_from_radius, formant_track, frame_resonances, FormantConfig, FormantFrame, FormantTrack,
};
pub use noise::{gne_windows, hnr_at_period, hnr_from_correlation, GneConfig};
pub use perturbation::{jitter, shimmer, JitterSet, ShimmerSet};
pub use pitch::{PeriodSequence, PitchConfig, PitchTrack};
pub use vowel_space::{vowel_space, CornerFormants, VowelSpaceMetrics};

use crate::corpus::Recording;
use crate::functionals::{median, track_features, Functional};
use indexmap::IndexMap;
use pitch::{track_cycles, track_pitch, Analysis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConventionalError {
    #[error("recording too short: {samples} samples, need {needed}")]
    TooShort { samples: usize, needed: usize },
    #[error("no voiced frames")]
    Unvoiced,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConventionalConfig {
    pub pitch: PitchConfig,
    pub gne: GneConfig,
    pub formants: FormantConfig,
}

/// Teager-Kaiser energy `x[n]^2 - x[n-1] x[n+1]` for `n = 1..N-1`.
pub fn tkeo(samples: &[f64]) -> Vec<f64> {
    samples
        .windows(3)
        .map(|w| w[1] * w[1] - w[0] * w[2])
        .collect()
}

/// Pitch analysis plus its glottal cycles.
pub struct PitchAnalysis {
    pub track: PitchTrack,
    pub cycles: PeriodSequence,
}

/// F0 per voiced frame (Hz) and glottal cycles.
pub fn estimate_f0_and_cycles(rec: &Recording, cfg: &PitchConfig) -> Result<(Vec<f64>, PeriodSequence), ConventionalError> {
    let pa = analyse_pitch(&rec.samples, rec.sample_rate as f64, cfg)?;
    Ok((pa.track.f0_contour(), pa.cycles))
}

pub fn analyse_pitch(samples: &[f64], fs: f64, cfg: &PitchConfig) -> Result<PitchAnalysis, ConventionalError> {
    let min_len = (0.1 * fs) as usize;
    if samples.len() < min_len {
        return Err(ConventionalError::TooShort {
            samples: samples.len(),
            needed: min_len,
        });
    }
    let an = Analysis::new(samples, fs);
    let track = track_pitch(&an, cfg)?;
    if !track.any_voiced() {
        return Err(ConventionalError::Unvoiced);
    }
    let cycles = track_cycles(&an, &track, cfg);
    Ok(PitchAnalysis { track, cycles })
}

/// HNR in dB on each voiced frame.
pub fn hnr(rec: &Recording, cfg: &PitchConfig) -> Result<Vec<f64>, ConventionalError> {
    let pa = analyse_pitch(&rec.samples, rec.sample_rate as f64, cfg)?;
    Ok(noise::hnr_track(&pa.track))
}

fn voiced_at(track: &PitchTrack, cfg: &PitchConfig, sample: usize) -> bool {
    let max_lag = (track.sample_rate / cfg.f0_min).ceil() as usize;
    let n = track.lags.len();
    if n == 0 {
        return false;
    }
    let hop = if n > 1 {
        (track.frame_starts[1] - track.frame_starts[0]) as f64
    } else {
        1.0
    };
    let idx = ((sample as f64 - track.frame_centre(0, max_lag)) / hop)
        .round()
        .clamp(0.0, (n - 1) as f64) as usize;
    track.is_voiced(idx)
}

/// GNE on analysis windows centred in voiced frames.
pub fn gne(rec: &Recording, cfg: &ConventionalConfig) -> Result<Vec<f64>, ConventionalError> {
    let fs = rec.sample_rate as f64;
    let pa = analyse_pitch(&rec.samples, fs, &cfg.pitch)?;
    Ok(gne_windows(&rec.samples, fs, &cfg.gne)
        .into_iter()
        .filter(|&(c, _)| voiced_at(&pa.track, &cfg.pitch, c))
        .map(|(_, g)| g)
        .collect())
}

/// Formant track restricted to voiced frames.
pub fn formants(rec: &Recording, cfg: &ConventionalConfig) -> Result<FormantTrack, ConventionalError> {
    let fs = rec.sample_rate as f64;
    let pa = analyse_pitch(&rec.samples, fs, &cfg.pitch)?;
    Ok(formant_track(&rec.samples, fs, &cfg.formants, &|c| {
        voiced_at(&pa.track, &cfg.pitch, c)
    }))
}

/// Named conventional measures of one recording plus its median F1/F2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConventionalFeatures {
    pub features: IndexMap<String, f64>,
    pub corner: Option<CornerFormants>,
}

/// All conventional measures of a recording. Track measures go through the
/// functionals; jitter and shimmer are single values per recording.
pub fn conventional_features(
    rec: &Recording,
    cfg: &ConventionalConfig,
    kinds: &[Functional],
) -> Result<ConventionalFeatures, ConventionalError> {
    let fs = rec.sample_rate as f64;
    let pa = analyse_pitch(&rec.samples, fs, &cfg.pitch)?;
    let mut features = IndexMap::new();
    features.extend(track_features("F0", &pa.track.f0_contour(), kinds));
    for (name, value) in jitter(&pa.cycles).named().into_iter().chain(shimmer(&pa.cycles).named()) {
        if let Some(v) = value {
            features.insert(name.to_string(), v);
        }
    }
    features.extend(track_features("TKEO", &tkeo(&rec.samples), kinds));
    features.extend(track_features("HNR", &noise::hnr_track(&pa.track), kinds));

    let gne_vals: Vec<f64> = gne_windows(&rec.samples, fs, &cfg.gne)
        .into_iter()
        .filter(|&(c, _)| voiced_at(&pa.track, &cfg.pitch, c))
        .map(|(_, g)| g)
        .collect();
    features.extend(track_features("GNE", &gne_vals, kinds));

    let ft = formant_track(&rec.samples, fs, &cfg.formants, &|c| {
        voiced_at(&pa.track, &cfg.pitch, c)
    });
    for k in 0..3 {
        features.extend(track_features(&format!("F{}", k + 1), &ft.formant(k), kinds));
        features.extend(track_features(&format!("BW{}", k + 1), &ft.bandwidth(k), kinds));
    }
    let corner = match (median(&ft.formant(0)), median(&ft.formant(1))) {
        (Some(f1), Some(f2)) => Some(CornerFormants { f1, f2 }),
        _ => None,
    };
    Ok(ConventionalFeatures { features, corner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RecordingId;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn rec(samples: Vec<f64>) -> Recording {
        Recording::new(RecordingId::from_stem("T_a_l").unwrap(), samples, 16_000).unwrap()
    }

    fn harmonic_train(f0: &dyn Fn(f64) -> f64, fs: f64, n: usize) -> Vec<f64> {
        // Phase-accumulated band-limited pulse train with a time-varying F0.
        let mut phase = 0.0;
        (0..n)
            .map(|i| {
                let f = f0(i as f64 / fs);
                phase += 2.0 * PI * f / fs;
                let k_max = (4000.0 / f) as usize;
                (1..=k_max).map(|k| (k as f64 * phase).cos()).sum::<f64>() / k_max as f64
            })
            .collect()
    }

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| 0.3 * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect()
    }

    #[test]
    fn tkeo_constant_is_zero() {
        assert!(tkeo(&[0.7; 10]).iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn tkeo_cosine_closed_form() {
        let (a, w) = (0.8, 0.3);
        let x: Vec<f64> = (0..2000).map(|n| a * (w * n as f64).cos()).collect();
        let psi = tkeo(&x);
        let expect = a * a * w.sin().powi(2);
        let (lo, hi) = psi.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
        assert!((hi - lo) / expect < 1e-6);
        assert!((psi[1000] - expect).abs() < 1e-9);
    }

    #[test]
    fn tkeo_impulse() {
        let mut x = vec![0.0; 7];
        x[3] = 1.0;
        let psi = tkeo(&x);
        // psi index i corresponds to sample i + 1.
        assert_eq!(psi[2], 1.0);
        assert_eq!(psi[1], x[2] * x[2] - x[1] * x[3]);
        assert_eq!(psi[3], x[4] * x[4] - x[3] * x[5]);
    }

    #[test]
    fn pulse_train_median_f0() {
        let x = harmonic_train(&|_| 140.0, 16_000.0, 16_000);
        let (f0, cycles) = estimate_f0_and_cycles(&rec(x), &PitchConfig::default()).unwrap();
        let m = median(&f0).unwrap();
        assert!((m - 140.0).abs() <= 1.0);
        assert!(cycles.period_lengths.iter().all(|&t| (1.0 / 500.0..=1.0 / 60.0).contains(&t)));
        let j = jitter(&cycles);
        assert!(j.local.unwrap() < 0.002);
    }

    #[test]
    fn white_noise_is_unvoiced() {
        assert_eq!(
            estimate_f0_and_cycles(&rec(noise(16_000, 1)), &PitchConfig::default()).unwrap_err(),
            ConventionalError::Unvoiced
        );
    }

    #[test]
    fn vibrato_contour_brackets() {
        let x = harmonic_train(&|t| 140.0 * (1.0 + 0.02 * (2.0 * PI * 2.0 * t).sin()), 16_000.0, 24_000);
        let (f0, _) = estimate_f0_and_cycles(&rec(x), &PitchConfig::default()).unwrap();
        let (lo, hi) = f0.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
        assert!((lo - 137.2).abs() <= 0.5, "min {lo}");
        assert!((hi - 142.8).abs() <= 0.5, "max {hi}");
    }

    #[test]
    fn pure_train_hnr_is_high() {
        let x = harmonic_train(&|_| 140.0, 16_000.0, 16_000);
        let h = hnr(&rec(x), &PitchConfig::default()).unwrap();
        assert!(median(&h).unwrap() >= 40.0, "{:?}", median(&h));
    }

    #[test]
    fn hnr_decreases_with_noise() {
        let clean = harmonic_train(&|_| 140.0, 16_000.0, 16_000);
        let n = noise(16_000, 4);
        let mut last = f64::INFINITY;
        for level in [0.05, 0.15, 0.4] {
            let x: Vec<f64> = clean.iter().zip(&n).map(|(c, e)| c + level * e).collect();
            let h = median(&hnr(&rec(x), &PitchConfig::default()).unwrap()).unwrap();
            assert!(h < last, "level {level}: {h} !< {last}");
            last = h;
        }
    }

    #[test]
    fn too_short_recording() {
        assert!(matches!(
            estimate_f0_and_cycles(&rec(vec![0.1; 800]), &PitchConfig::default()),
            Err(ConventionalError::TooShort { .. })
        ));
    }

    #[test]
    fn formant_recovery_within_three_percent() {
        let fs = 16_000.0;
        for f0 in [100.0, 140.0, 200.0] {
            let x = formants::tests::resonant_vowel(f0, &formants::tests::PLANTED, fs, 12_000);
            let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let x: Vec<f64> = x.iter().map(|v| 0.5 * v / peak).collect();
            let ft = formants(&rec(x), &ConventionalConfig::default()).unwrap();
            let f1 = median(&ft.formant(0)).unwrap();
            let f2 = median(&ft.formant(1)).unwrap();
            assert!((f1 / 700.0 - 1.0).abs() < 0.03, "f0 {f0}: {f1}");
            assert!((f2 / 1220.0 - 1.0).abs() < 0.03, "f0 {f0}: {f2}");
        }
    }

    #[test]
    fn feature_names() {
        let x = formants::tests::resonant_vowel(130.0, &[(700.0, 80.0), (1220.0, 90.0), (2600.0, 120.0)], 16_000.0, 16_000);
        let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let x: Vec<f64> = x.iter().map(|v| 0.5 * v / peak).collect();
        let f = conventional_features(&rec(x), &ConventionalConfig::default(), &Functional::ALL).unwrap();
        for name in ["F0 (median)", "jitter (local)", "shimmer (local.dB)", "HNR (std)", "GNE (99p)", "F1 (median)", "BW3 (ir)", "TKEO (1p)"] {
            assert!(f.features.contains_key(name), "{name}");
        }
        assert!(f.corner.is_some());
        assert!(f.features.values().all(|v| v.is_finite()));
    }
}
