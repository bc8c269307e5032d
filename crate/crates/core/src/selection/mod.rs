//! Two-stage feature selection: an mRMR filter followed by an SFFS wrapper.

mod mrmr;
mod sffs;

pub use mrmr::{mrmr, MrmrScheme};
pub use sffs::{sffs, Criterion, SffsOutcome, SffsStep, StepKind};

use crate::corpus::FeatureMatrix;
use crate::model::{to_columns, ClassMetrics, ForestConfig, Learner, ModelError, Predictor};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("no features to select from")]
    NoFeatures,
    #[error("feature columns, names and labels disagree in shape")]
    Shape,
    #[error("labels contain a single class")]
    SingleClass,
    #[error("the criterion failed on every candidate")]
    CriterionFailed,
    #[error("invalid selection configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub const MAX_SUBSET_SIZE: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    /// Features kept by mRMR.
    pub k: usize,
    pub max_size: usize,
    pub scheme: MrmrScheme,
    pub criterion: Criterion,
    pub mi_bins: Option<usize>,
    /// Forest used inside the SFFS criterion.
    pub wrapper_forest: ForestConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            k: 500,
            max_size: MAX_SUBSET_SIZE,
            scheme: MrmrScheme::Mid,
            criterion: Criterion::Tss,
            mi_bins: None,
            wrapper_forest: ForestConfig {
                n_trees: 50,
                ..ForestConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub chosen: Vec<String>,
    /// Best criterion value after each accepted SFFS step.
    pub criterion_trace: Vec<f64>,
    /// (features after mRMR, final subset size).
    pub stage_sizes: (usize, usize),
    pub score: f64,
}

/// mRMR down to `cfg.k` features, then SFFS over that set in mRMR order.
pub fn select_features(matrix: &FeatureMatrix, labels: &[bool], cfg: &SelectionConfig) -> Result<SelectionResult, SelectionError> {
    if cfg.max_size == 0 || cfg.max_size > MAX_SUBSET_SIZE {
        return Err(SelectionError::InvalidConfig(format!("max_size must be in 1..={MAX_SUBSET_SIZE}")));
    }
    if labels.len() != matrix.n_rows() {
        return Err(SelectionError::Shape);
    }
    let columns = matrix.columns();
    let refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    let ranked = mrmr(&refs, &matrix.feature_names, labels, cfg.k, cfg.scheme, cfg.mi_bins)?;
    let out = sffs(&refs, labels, &ranked, cfg.max_size, &cfg.wrapper_forest, cfg.criterion)?;
    Ok(SelectionResult {
        chosen: out.chosen.iter().map(|&j| matrix.feature_names[j].clone()).collect(),
        criterion_trace: out.best_so_far,
        stage_sizes: (ranked.len(), out.chosen.len()),
        score: out.score,
    })
}

/// Where feature selection sits relative to the leave-one-out loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// Select once on all subjects, then run leave-one-out on the result.
    #[default]
    Paper,
    /// Repeat the whole selection inside every fold.
    Nested,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::Paper => "paper",
            Placement::Nested => "nested",
        })
    }
}

impl FromStr for Placement {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Placement::Paper),
            "nested" => Ok(Placement::Nested),
            other => Err(format!("unknown selection placement '{other}' (expected paper or nested)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementOutcome {
    pub placement: Placement,
    pub metrics: ClassMetrics,
    /// Selection on all subjects for the paper placement; one per held-out
    /// subject for the nested placement.
    pub selections: Vec<SelectionResult>,
}

fn select_columns(matrix: &FeatureMatrix, names: &[String]) -> Vec<Vec<f64>> {
    names
        .iter()
        .map(|n| matrix.column(matrix.column_index(n).expect("selected name comes from the matrix")))
        .collect()
}

/// Leave-one-out metrics of `classifier` with selection placed as requested.
pub fn evaluate_with_selection(
    matrix: &FeatureMatrix,
    labels: &[bool],
    cfg: &SelectionConfig,
    classifier: &ForestConfig,
    placement: Placement,
) -> Result<PlacementOutcome, SelectionError> {
    match placement {
        Placement::Paper => {
            let sel = select_features(matrix, labels, cfg)?;
            let cols = select_columns(matrix, &sel.chosen);
            let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
            let metrics = crate::model::loo_evaluate(classifier, &refs, labels)?;
            Ok(PlacementOutcome {
                placement,
                metrics,
                selections: vec![sel],
            })
        }
        Placement::Nested => {
            let n = labels.len();
            if n < crate::model::MIN_LOO_SAMPLES {
                return Err(ModelError::TooFewSamples { got: n, needed: crate::model::MIN_LOO_SAMPLES }.into());
            }
            let mut predictions = Vec::with_capacity(n);
            let mut selections = Vec::with_capacity(n);
            for held_out in 0..n {
                log::debug!("nested selection fold {}/{n}", held_out + 1);
                let train: Vec<usize> = (0..n).filter(|&i| i != held_out).collect();
                let train_labels: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
                let sel = select_features(&matrix.select_rows(&train), &train_labels, cfg)?;
                let cols = select_columns(matrix, &sel.chosen);
                let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
                let model = classifier.fit(&refs, labels, &train)?;
                predictions.push(model.predict(&refs, held_out));
                selections.push(sel);
            }
            Ok(PlacementOutcome {
                placement,
                metrics: ClassMetrics::from_predictions(labels, &predictions),
                selections,
            })
        }
    }
}

/// Rows of `matrix` restricted to the named columns, subject-major.
pub fn restrict_rows(matrix: &FeatureMatrix, names: &[String]) -> Vec<Vec<f64>> {
    to_columns(&select_columns(matrix, names))
}
