//! Cycle-to-cycle period (jitter) and amplitude (shimmer) perturbation.
//!
//! Definitions follow the usual clinical voice-analysis conventions. Each
//! variant is `None` when the sequence is too short for its window.

use super::PeriodSequence;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct JitterSet {
    pub local: Option<f64>,
    /// Seconds.
    pub local_abs: Option<f64>,
    pub rap: Option<f64>,
    pub ppq5: Option<f64>,
    pub ddp: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ShimmerSet {
    pub local: Option<f64>,
    /// Decibels.
    pub local_db: Option<f64>,
    pub apq3: Option<f64>,
    pub apq5: Option<f64>,
    pub apq11: Option<f64>,
    pub dda: Option<f64>,
}

impl JitterSet {
    pub fn named(&self) -> [(&'static str, Option<f64>); 5] {
        [
            ("jitter (local)", self.local),
            ("jitter (local.abs)", self.local_abs),
            ("jitter (rap)", self.rap),
            ("jitter (ppq5)", self.ppq5),
            ("jitter (ddp)", self.ddp),
        ]
    }
}

impl ShimmerSet {
    pub fn named(&self) -> [(&'static str, Option<f64>); 6] {
        [
            ("shimmer (local)", self.local),
            ("shimmer (local.dB)", self.local_db),
            ("shimmer (apq3)", self.apq3),
            ("shimmer (apq5)", self.apq5),
            ("shimmer (apq11)", self.apq11),
            ("shimmer (dda)", self.dda),
        ]
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean absolute difference between consecutive values.
fn mean_abs_diff(v: &[f64]) -> Option<f64> {
    (v.len() >= 2).then(|| v.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (v.len() - 1) as f64)
}

/// Mean absolute deviation of each value from the centred `width`-point
/// moving average.
fn perturbation_quotient(v: &[f64], width: usize) -> Option<f64> {
    (v.len() >= width).then(|| {
        let sum: f64 = v
            .windows(width)
            .map(|w| (w[width / 2] - mean(w)).abs())
            .sum();
        sum / (v.len() + 1 - width) as f64
    })
}

/// Mean absolute second difference.
fn mean_abs_second_diff(v: &[f64]) -> Option<f64> {
    (v.len() >= 3).then(|| {
        v.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]).abs()).sum::<f64>() / (v.len() - 2) as f64
    })
}

pub fn jitter(p: &PeriodSequence) -> JitterSet {
    let t = &p.period_lengths;
    if t.is_empty() {
        return JitterSet::default();
    }
    let mt = mean(t);
    let rel = |v: Option<f64>| v.map(|x| x / mt);
    JitterSet {
        local: rel(mean_abs_diff(t)),
        local_abs: mean_abs_diff(t),
        rap: rel(perturbation_quotient(t, 3)),
        ppq5: rel(perturbation_quotient(t, 5)),
        ddp: rel(mean_abs_second_diff(t)),
    }
}

pub fn shimmer(p: &PeriodSequence) -> ShimmerSet {
    let a = &p.cycle_peak_amplitudes;
    if a.is_empty() {
        return ShimmerSet::default();
    }
    let ma = mean(a);
    let rel = |v: Option<f64>| v.map(|x| x / ma);
    let local_db = (a.len() >= 2 && a.iter().all(|&v| v > 0.0)).then(|| {
        a.windows(2)
            .map(|w| (20.0 * (w[1] / w[0]).log10()).abs())
            .sum::<f64>()
            / (a.len() - 1) as f64
    });
    ShimmerSet {
        local: rel(mean_abs_diff(a)),
        local_db,
        apq3: rel(perturbation_quotient(a, 3)),
        apq5: rel(perturbation_quotient(a, 5)),
        apq11: rel(perturbation_quotient(a, 11)),
        dda: rel(mean_abs_second_diff(a)),
    }
}
