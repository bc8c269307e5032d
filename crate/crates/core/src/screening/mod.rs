//! Univariate feature statistics against class labels and clinical scores.

mod correlation;
mod information;
mod mann_whitney;

pub use correlation::{mid_ranks, partial_spearman, spearman, spearman_permutation, Correlation, MIN_SPEARMAN_N};
pub(crate) use information::Binned;
pub use information::{default_bins, discrete_mutual_information, equal_frequency_bins, mutual_information, MIN_MI_N};
pub use mann_whitney::{mann_whitney_u, MannWhitney, EXACT_LIMIT};

use crate::corpus::FeatureMatrix;
use crate::model::{loo_evaluate, ClassMetrics, ForestConfig, ModelError};
use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScreeningError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { got: usize, needed: usize },
    #[error("both groups must be non-empty")]
    EmptyGroup,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Statistics of one feature against the PD/HC label. Absent statistics
/// are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningRow {
    pub feature_name: String,
    /// Spearman's rho between the feature and the PD indicator.
    pub rho: Option<f64>,
    /// Mutual information with the label, in bits.
    pub mi: Option<f64>,
    /// Two-sided Mann-Whitney p, PD against HC.
    pub p_value: Option<f64>,
    pub n: usize,
    /// Single-feature leave-one-out forest metrics, for winner candidates only.
    pub metrics: Option<ClassMetrics>,
    /// Best single-feature TSS within its vowel/style group.
    pub winner: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialCorrRow {
    pub clinical_score_name: String,
    pub feature_name: String,
    pub partial_rho: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScreeningConfig {
    /// MI bin count; `None` uses `floor(sqrt(n / 2))`.
    pub mi_bins: Option<usize>,
    /// Features per group, ranked by Mann-Whitney p, that get the
    /// single-feature forest evaluation. 0 evaluates every feature.
    pub winner_candidates: usize,
    pub forest: ForestConfig,
}

impl Default for ScreeningConfig {
    fn default() -> Self {
        Self {
            mi_bins: None,
            winner_candidates: 10,
            forest: ForestConfig {
                n_trees: 100,
                ..ForestConfig::default()
            },
        }
    }
}

/// Group key of a feature name: the text before the first `": "`, e.g.
/// `"a (s)"` for `"a (s): HNR (median)"`.
pub fn feature_group(name: &str) -> &str {
    name.split_once(": ").map_or("", |(g, _)| g)
}

fn feature_statistics(name: &str, x: &[f64], labels: &[bool], cfg: &ScreeningConfig) -> Result<ScreeningRow, ScreeningError> {
    let label_values: Vec<f64> = labels.iter().map(|&l| l as u8 as f64).collect();
    let rho = if x.len() >= MIN_SPEARMAN_N {
        spearman(x, &label_values)?.map(|c| c.rho)
    } else {
        None
    };
    let mi = if x.len() >= MIN_MI_N {
        mutual_information(x, labels, cfg.mi_bins)?
    } else {
        None
    };
    let pd: Vec<f64> = x.iter().zip(labels).filter(|(_, &l)| l).map(|(&v, _)| v).collect();
    let hc: Vec<f64> = x.iter().zip(labels).filter(|(_, &l)| !l).map(|(&v, _)| v).collect();
    let p_value = if pd.is_empty() || hc.is_empty() {
        None
    } else {
        Some(mann_whitney_u(&pd, &hc)?.p_value)
    };
    Ok(ScreeningRow {
        feature_name: name.to_string(),
        rho,
        mi,
        p_value,
        n: x.len(),
        metrics: None,
        winner: false,
    })
}

/// One row per feature, in matrix order, with one winner flagged per group.
///
/// Within each group the `winner_candidates` features with the smallest
/// Mann-Whitney p are evaluated by a single-feature leave-one-out forest;
/// the winner has the highest TSS, then the smallest p, then the first name.
pub fn screen_matrix(matrix: &FeatureMatrix, labels: &[bool], cfg: &ScreeningConfig) -> Result<Vec<ScreeningRow>, ScreeningError> {
    if labels.len() != matrix.n_rows() {
        return Err(ScreeningError::LengthMismatch(matrix.n_rows(), labels.len()));
    }
    let columns = matrix.columns();
    let mut rows: Vec<ScreeningRow> = matrix
        .feature_names
        .par_iter()
        .zip(columns.par_iter())
        .map(|(name, x)| feature_statistics(name, x, labels, cfg))
        .collect::<Result<_, _>>()?;

    let mut groups: IndexMap<&str, Vec<usize>> = IndexMap::new();
    for (j, name) in matrix.feature_names.iter().enumerate() {
        groups.entry(feature_group(name)).or_default().push(j);
    }
    let p: Vec<f64> = rows.iter().map(|r| r.p_value.unwrap_or(f64::INFINITY)).collect();
    let mut candidates: Vec<usize> = Vec::new();
    for members in groups.values() {
        let mut ranked = members.clone();
        ranked.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
        ranked.retain(|&j| rows[j].p_value.is_some());
        if cfg.winner_candidates > 0 {
            ranked.truncate(cfg.winner_candidates);
        }
        candidates.extend(ranked);
    }
    let evaluated: Vec<(usize, Option<ClassMetrics>)> = candidates
        .par_iter()
        .map(|&j| {
            let col = [columns[j].as_slice()];
            match loo_evaluate(&cfg.forest, &col, labels) {
                Ok(m) => (j, Some(m)),
                Err(e) => {
                    log::warn!("single-feature evaluation of {} failed: {e}", matrix.feature_names[j]);
                    (j, None)
                }
            }
        })
        .collect();
    for (j, m) in evaluated {
        rows[j].metrics = m;
    }
    for members in groups.values() {
        let tss = |j: usize| rows[j].metrics.map(|m| m.tss);
        let best = members
            .iter()
            .copied()
            .filter(|&j| tss(j).is_some())
            .min_by(|&a, &b| {
                let (ta, tb) = (tss(a).unwrap(), tss(b).unwrap());
                tb.total_cmp(&ta).then(p[a].total_cmp(&p[b])).then(a.cmp(&b))
            });
        if let Some(j) = best {
            rows[j].winner = true;
        }
    }
    Ok(rows)
}
