use super::{CorpusError, Recording};
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const TARGET_RATE: u32 = 16_000;

const TAPS: usize = 321;
const CUTOFF_HZ: f64 = 7_500.0;
const KAISER_BETA: f64 = 8.0;

/// Bring a recording to 16 kHz. 16 kHz input is returned unchanged; 48 kHz
/// input is low-pass filtered then decimated 3:1.
pub fn resample_to_16k(rec: Recording) -> Result<Recording, CorpusError> {
    match rec.sample_rate {
        TARGET_RATE => Ok(rec),
        48_000 => {
            let samples = decimate_by_3(&rec.samples);
            Recording::new(rec.id, samples, TARGET_RATE)
        }
        other => Err(CorpusError::UnsupportedRate(other)),
    }
}

/// Kaiser-windowed sinc anti-alias filter (48 kHz design rate), unit DC gain.
fn taps() -> &'static [f64] {
    static TAPS_CELL: OnceLock<Vec<f64>> = OnceLock::new();
    TAPS_CELL.get_or_init(|| {
        let fc = CUTOFF_HZ / 48_000.0;
        let mid = (TAPS - 1) as f64 / 2.0;
        let i0_beta = bessel_i0(KAISER_BETA);
        let mut h: Vec<f64> = (0..TAPS)
            .map(|n| {
                let t = n as f64 - mid;
                let sinc = if t == 0.0 {
                    2.0 * fc
                } else {
                    (2.0 * PI * fc * t).sin() / (PI * t)
                };
                let ratio = t / mid;
                let w = bessel_i0(KAISER_BETA * (1.0 - ratio * ratio).max(0.0).sqrt()) / i0_beta;
                sinc * w
            })
            .collect();
        let sum: f64 = h.iter().sum();
        h.iter_mut().for_each(|v| *v /= sum);
        h
    })
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half = x / 2.0;
    for k in 1..60 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Zero-phase low-pass then keep every third sample; output length is
/// `ceil(N / 3)`.
pub fn decimate_by_3(samples: &[f64]) -> Vec<f64> {
    let h = taps();
    let half = (TAPS / 2) as isize;
    let n = samples.len() as isize;
    (0..samples.len().div_ceil(3))
        .map(|m| {
            let centre = 3 * m as isize;
            let mut acc = 0.0;
            for (k, &hk) in h.iter().enumerate() {
                let idx = centre + half - k as isize;
                if idx >= 0 && idx < n {
                    acc += hk * samples[idx as usize];
                }
            }
            acc
        })
        .collect()
}
