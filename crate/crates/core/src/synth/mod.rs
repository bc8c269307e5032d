//! Synthetic vowels and cohorts with known perturbation parameters.
//!
//! A Rosenberg glottal pulse train with per-cycle period and amplitude
//! perturbation drives a cascade of formant resonators. White noise is then
//! mixed in at the requested harmonic-to-noise ratio.

mod cohort;

pub use cohort::{
    generate_cohort, write_cohort, Cohort, CohortProfile, GroupProfile, SpeakerTruth, METADATA_FILE, MIN_GROUP_SIZE,
    TRUTH_FILE,
};

use crate::corpus::{decimate_by_3, Recording, RecordingId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

pub const SAMPLE_RATE: u32 = 16_000;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthesis parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisParams {
    pub f0: f64,
    /// Local jitter, percent of the mean period.
    pub jitter_pct: f64,
    /// Local shimmer, percent of the mean amplitude.
    pub shimmer_pct: f64,
    pub hnr_target: f64,
    pub formants: [f64; 3],
    pub bandwidths: [f64; 3],
    /// Seconds.
    pub duration: f64,
    /// Level relative to the nominal RMS of 0.08, dB.
    pub intensity: f64,
    pub seed: u64,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        Self {
            f0: 130.0,
            jitter_pct: 0.0,
            shimmer_pct: 0.0,
            hnr_target: 30.0,
            formants: [700.0, 1220.0, 2600.0],
            bandwidths: [80.0, 90.0, 120.0],
            duration: 1.0,
            intensity: 0.0,
            seed: 0,
        }
    }
}

impl SynthesisParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |what: &str| Err(SynthError::InvalidParameter(what.to_string()));
        if !(60.0..=400.0).contains(&self.f0) {
            return bad("f0 must lie in [60, 400] Hz");
        }
        if !(0.0..=10.0).contains(&self.jitter_pct) || !(0.0..=10.0).contains(&self.shimmer_pct) {
            return bad("jitter and shimmer must lie in [0, 10] %");
        }
        if !self.hnr_target.is_finite() {
            return bad("hnr_target must be finite");
        }
        let nyquist = SAMPLE_RATE as f64 / 2.0;
        if self.formants.iter().chain(&self.bandwidths).any(|&f| !(f > 0.0 && f < nyquist)) {
            return bad("formants and bandwidths must lie in (0, 8000) Hz");
        }
        if !(self.duration >= 0.1 && self.duration <= 30.0) {
            return bad("duration must lie in [0.1, 30] s");
        }
        if !(-30.0..=12.0).contains(&self.intensity) {
            return bad("intensity must lie in [-30, 12] dB");
        }
        Ok(())
    }
}

pub const NOMINAL_RMS: f64 = 0.08;
const OPEN_QUOTIENT: f64 = 0.4;
const CLOSING_QUOTIENT: f64 = 0.16;

/// Rosenberg flow derivative at time `t` into a cycle of length `period`.
fn rosenberg_derivative(t: f64, period: f64) -> f64 {
    let tp = OPEN_QUOTIENT * period;
    let tn = CLOSING_QUOTIENT * period;
    if t < 0.0 || t >= tp + tn {
        0.0
    } else if t < tp {
        PI / (2.0 * tp) * (PI * t / tp).sin()
    } else {
        -PI / (2.0 * tn) * (PI * (t - tp) / (2.0 * tn)).sin()
    }
}

/// Draw from N(0, 1) truncated at ±3.
fn bounded_normal(rng: &mut ChaCha8Rng) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    z.clamp(-3.0, 3.0)
}

/// Two-pole resonator with unit gain at DC.
fn resonate(x: &mut [f64], freq: f64, bw: f64, fs: f64) {
    let c = -(-2.0 * PI * bw / fs).exp();
    let b = 2.0 * (-PI * bw / fs).exp() * (2.0 * PI * freq / fs).cos();
    let a = 1.0 - b - c;
    let (mut y1, mut y2) = (0.0, 0.0);
    for v in x.iter_mut() {
        let y = a * *v + b * y1 + c * y2;
        y2 = y1;
        y1 = y;
        *v = y;
    }
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Mean absolute successive difference relative to the mean of `1 + sd * z`.
fn realized_local(z: &[f64], sd: f64) -> f64 {
    if z.len() < 2 || sd == 0.0 {
        return 0.0;
    }
    let diff: f64 = z.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (z.len() - 1) as f64;
    let mean = 1.0 + sd * z.iter().sum::<f64>() / z.len() as f64;
    sd * diff / mean
}

/// Scale for `z` so that the first cycles covering `duration` show local
/// perturbation `target` exactly.
fn calibrate(z: &[f64], target: f64, cycle_count: impl Fn(f64) -> usize) -> f64 {
    if target == 0.0 {
        return 0.0;
    }
    // Starting guess from E|z_k - z_{k-1}| = 2 / sqrt(pi) for iid normals.
    let mut sd = target / 1.128_379_167_095_512_6;
    for _ in 0..6 {
        let used = cycle_count(sd).clamp(2, z.len());
        let got = realized_local(&z[..used], sd);
        if got <= 0.0 {
            break;
        }
        // realized_local is close to linear in sd for small sd.
        sd *= target / got;
    }
    sd
}

/// Glottal cycle onsets (s) and amplitudes. Period and amplitude deviations
/// are bounded normal draws scaled so that the realized local jitter and
/// shimmer over the synthesized cycles equal the requested percentages.
fn glottal_cycles(p: &SynthesisParams, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let period = 1.0 / p.f0;
    // Periods shrink by at most 30% (3 sd at 10% jitter).
    let cap = (p.duration / period / 0.7).ceil() as usize + 2;
    let zp: Vec<f64> = (0..cap).map(|_| bounded_normal(rng)).collect();
    let za: Vec<f64> = (0..cap).map(|_| bounded_normal(rng)).collect();
    let count = |sd: f64| {
        let mut t = 0.0;
        let mut k = 0;
        while t < p.duration && k < cap {
            t += period * (1.0 + sd * zp[k]);
            k += 1;
        }
        k
    };
    let period_sd = calibrate(&zp, p.jitter_pct / 100.0, count);
    let used = count(period_sd);
    let amp_sd = calibrate(&za, p.shimmer_pct / 100.0, |_| used);
    let mut onsets = Vec::with_capacity(used + 1);
    let mut t = 0.0;
    for &z in &zp[..used] {
        onsets.push(t);
        t += period * (1.0 + period_sd * z);
    }
    onsets.push(t);
    let amps = za[..used].iter().map(|&z| 1.0 + amp_sd * z).collect();
    (onsets, amps)
}

/// Source oversampling; the pulse's closing edge aliases at 16 kHz.
const OVERSAMPLE: usize = 9;

/// The harmonic part only, before level scaling.
fn voiced_signal(p: &SynthesisParams, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let fs = SAMPLE_RATE as f64;
    let fine_fs = fs * OVERSAMPLE as f64;
    let n = (p.duration * fs).round() as usize;
    let (onsets, amps) = glottal_cycles(p, rng);
    let mut fine = vec![0.0; n * OVERSAMPLE];
    for k in 0..amps.len() {
        let (start, end) = (onsets[k], onsets[k + 1]);
        let period = end - start;
        let first = (start * fine_fs).ceil() as usize;
        let last = ((end * fine_fs).ceil() as usize).min(fine.len());
        for (i, v) in fine.iter_mut().enumerate().take(last).skip(first) {
            // Open phase last, so glottal closures fall on cycle boundaries
            // and closure-to-closure intervals equal the drawn periods.
            let open_at = start + (1.0 - OPEN_QUOTIENT - CLOSING_QUOTIENT) * period;
            *v = rosenberg_derivative(i as f64 / fine_fs - open_at, period);
        }
    }
    let mut x = decimate_by_3(&decimate_by_3(&fine));
    x.resize(n, 0.0);
    for (&f, &bw) in p.formants.iter().zip(&p.bandwidths) {
        resonate(&mut x, f, bw, fs);
    }
    apply_cycle_gains(&mut x, &onsets, &amps, fs);
    x
}

const GAIN_FADE: f64 = 0.0005;

/// Scale each closure-to-closure stretch of the filtered signal by its cycle
/// amplitude. Scaling the source instead would let the previous cycle's
/// formant ringing leak into each peak. Gains change linearly over the
/// `GAIN_FADE` seconds before each closure.
fn apply_cycle_gains(x: &mut [f64], onsets: &[f64], amps: &[f64], fs: f64) {
    let fade = ((GAIN_FADE * fs).round() as usize).max(1);
    let n = x.len();
    for k in 0..amps.len() {
        let from = ((onsets[k] * fs).round() as usize).min(n);
        let to = ((onsets[k + 1] * fs).round() as usize).min(n);
        for (i, v) in x.iter_mut().enumerate().take(to).skip(from) {
            *v *= amps[k];
            let until_end = to - i;
            if k + 1 < amps.len() && until_end <= fade {
                let w = (fade - until_end + 1) as f64 / (fade + 1) as f64;
                *v *= 1.0 + w * (amps[k + 1] / amps[k] - 1.0);
            }
        }
    }
}

/// One synthetic vowel at 16 kHz. Deterministic in `p`.
pub fn synthesize_vowel(id: RecordingId, p: &SynthesisParams) -> Result<Recording, SynthError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut x = voiced_signal(p, &mut rng);
    let level = NOMINAL_RMS * 10f64.powf(p.intensity / 20.0);
    let gain = level / rms(&x).max(f64::MIN_POSITIVE);
    let noise_sd = level * 10f64.powf(-p.hnr_target / 20.0);
    for v in x.iter_mut() {
        let e: f64 = StandardNormal.sample(&mut rng);
        *v = *v * gain + noise_sd * e;
    }
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.99 {
        x.iter_mut().for_each(|v| *v *= 0.99 / peak);
    }
    Ok(Recording::new(id, x, SAMPLE_RATE)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conventional::{analyse_pitch, hnr, jitter, shimmer, PitchConfig};
    use crate::functionals::median;
    use rand::Rng;

    fn id() -> RecordingId {
        RecordingId::from_stem("T01_a_l").unwrap()
    }

    fn measure(p: &SynthesisParams) -> (f64, f64, f64, f64) {
        let rec = synthesize_vowel(id(), p).unwrap();
        let pa = analyse_pitch(&rec.samples, rec.sample_rate as f64, &PitchConfig::default()).unwrap();
        let j = jitter(&pa.cycles).local.unwrap() * 100.0;
        let s = shimmer(&pa.cycles).local.unwrap() * 100.0;
        let h = median(&hnr(&rec, &PitchConfig::default()).unwrap()).unwrap();
        let f0 = median(&pa.track.f0_contour()).unwrap();
        (j, s, h, f0)
    }

    fn with(f0: f64, seed: u64) -> SynthesisParams {
        SynthesisParams { f0, hnr_target: 60.0, duration: 1.5, seed, ..Default::default() }
    }

    #[test]
    fn clean_train_has_no_perturbation() {
        for f0 in [110.0, 140.0, 200.0] {
            let (j, s, _, f) = measure(&with(f0, 1));
            assert!(j < 0.2 && s < 0.2, "f0 {f0}: jitter {j} shimmer {s}");
            assert!((f - f0).abs() < 0.5);
        }
    }

    #[test]
    fn two_percent_jitter_round_trip() {
        for (f0, seed) in [(110.0, 1), (150.0, 2), (200.0, 3)] {
            let (j, ..) = measure(&SynthesisParams { jitter_pct: 2.0, ..with(f0, seed) });
            assert!((j - 2.0).abs() <= 0.4, "f0 {f0}: {j}");
        }
    }

    #[test]
    fn hnr_target_round_trip() {
        for f0 in [110.0, 200.0] {
            let (.., h, _) = measure(&SynthesisParams { hnr_target: 15.0, ..with(f0, 4) });
            assert!((h - 15.0).abs() <= 1.5, "f0 {f0}: {h}");
        }
    }

    /// Each draw perturbs one parameter on an otherwise clean vowel.
    #[test]
    fn fifty_draw_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for draw in 0..50u64 {
            let f0 = rng.random_range(90.0..250.0);
            let base = with(f0, 1000 + draw);
            let (param, p) = match draw % 3 {
                0 => ("jitter", SynthesisParams { jitter_pct: rng.random_range(0.2..3.0), ..base }),
                1 => ("shimmer", SynthesisParams { shimmer_pct: rng.random_range(0.2..3.0), ..base }),
                _ => ("hnr", SynthesisParams { hnr_target: rng.random_range(10.0..30.0), ..base }),
            };
            let (j, s, h, _) = measure(&p);
            let (got, want, tol) = match param {
                "jitter" => (j, p.jitter_pct, 0.4),
                "shimmer" => (s, p.shimmer_pct, 0.4),
                _ => (h, p.hnr_target, 1.5),
            };
            println!("{param} f0 {f0:.0}: injected {want:.3} measured {got:.3}");
            assert!((got - want).abs() <= tol, "draw {draw} {param} f0 {f0}: injected {want} measured {got}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = SynthesisParams { jitter_pct: 1.0, shimmer_pct: 2.0, hnr_target: 20.0, ..Default::default() };
        let a = synthesize_vowel(id(), &p).unwrap();
        assert_eq!(a, synthesize_vowel(id(), &p).unwrap());
        let b = synthesize_vowel(id(), &SynthesisParams { seed: 1, ..p }).unwrap();
        assert_ne!(a.samples, b.samples);
    }

    #[test]
    fn level_and_length() {
        let p = SynthesisParams { intensity: -6.0, duration: 0.5, ..Default::default() };
        let rec = synthesize_vowel(id(), &p).unwrap();
        assert_eq!(rec.samples.len(), 8000);
        let body = &rec.samples[800..7200];
        let level = 20.0 * (rms(body) / NOMINAL_RMS).log10();
        assert!((level + 6.0).abs() < 0.5, "{level}");
        assert!(rec.samples.iter().all(|v| v.abs() <= 0.99));
    }

    #[test]
    fn rejects_out_of_range() {
        for p in [
            SynthesisParams { f0: 50.0, ..Default::default() },
            SynthesisParams { jitter_pct: 10.5, ..Default::default() },
            SynthesisParams { shimmer_pct: -1.0, ..Default::default() },
            SynthesisParams { duration: 0.05, ..Default::default() },
            SynthesisParams { formants: [700.0, 1220.0, 9000.0], ..Default::default() },
        ] {
            assert!(matches!(synthesize_vowel(id(), &p), Err(SynthError::InvalidParameter(_))));
        }
    }
}
