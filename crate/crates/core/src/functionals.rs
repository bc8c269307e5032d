//! Scalar statistics collapsing frame tracks into named features.
//!
//! Percentiles use linear interpolation between closest ranks at
//! `rank = p/100 * (n - 1)` on the sorted track. `std` is the population
//! (1/N) standard deviation.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    #[serde(rename = "median")]
    Median,
    #[serde(rename = "std")]
    Std,
    #[serde(rename = "1p")]
    P1,
    #[serde(rename = "99p")]
    P99,
    #[serde(rename = "ir")]
    Ir,
}

impl Functional {
    pub const ALL: [Functional; 5] = [
        Functional::Median,
        Functional::Std,
        Functional::P1,
        Functional::P99,
        Functional::Ir,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Functional::Median => "median",
            Functional::Std => "std",
            Functional::P1 => "1p",
            Functional::P99 => "99p",
            Functional::Ir => "ir",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Functional {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Functional::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| format!("unknown functional '{s}'"))
    }
}

/// Percentile of an ascending-sorted, nonempty slice.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = (p / 100.0) * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = rank - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(percentile_sorted(&v, 50.0))
}

pub fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Evaluate the requested functionals on one track. Non-finite entries are
/// ignored; an empty track yields `None`.
pub fn evaluate(track: &[f64], kinds: &[Functional]) -> Option<Vec<f64>> {
    let mut sorted: Vec<f64> = track.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return None;
    }
    sorted.sort_by(f64::total_cmp);
    let p1 = percentile_sorted(&sorted, 1.0);
    let p99 = percentile_sorted(&sorted, 99.0);
    Some(
        kinds
            .iter()
            .map(|k| match k {
                Functional::Median => percentile_sorted(&sorted, 50.0),
                Functional::Std => population_std(&sorted),
                Functional::P1 => p1,
                Functional::P99 => p99,
                Functional::Ir => p99 - p1,
            })
            .collect(),
    )
}

/// English ordinal: 1st, 2nd, 3rd, 4th, 11th, 12th, 13th, 21st ...
pub fn ordinal(n: usize) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

/// Named scalars for a scalar track, e.g. `F0 (median)`.
pub fn track_features(descriptor: &str, track: &[f64], kinds: &[Functional]) -> IndexMap<String, f64> {
    let mut out = IndexMap::new();
    if let Some(values) = evaluate(track, kinds) {
        for (k, v) in kinds.iter().zip(values) {
            out.insert(format!("{descriptor} ({k})"), v);
        }
    }
    out
}

/// Named scalars for a frames × coefficients matrix, one band at a time,
/// e.g. `10th CMS (std)`. Coefficient indices are 1-based.
pub fn frame_features(family: &str, frames: &[Vec<f64>], kinds: &[Functional]) -> IndexMap<String, f64> {
    let mut out = IndexMap::new();
    let n_coeffs = frames.first().map_or(0, Vec::len);
    let mut column = Vec::with_capacity(frames.len());
    for j in 0..n_coeffs {
        column.clear();
        column.extend(frames.iter().map(|f| f[j]));
        if let Some(values) = evaluate(&column, kinds) {
            for (k, v) in kinds.iter().zip(values) {
                out.insert(format!("{} {family} ({k})", ordinal(j + 1)), v);
            }
        }
    }
    out
}
