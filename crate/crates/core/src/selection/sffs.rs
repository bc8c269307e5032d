//! Sequential floating forward selection around a leave-one-out wrapper.

use super::SelectionError;
use crate::model::{loo_evaluate, ClassMetrics, ForestConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Tss,
    Acc,
}

impl Criterion {
    pub fn score(self, m: &ClassMetrics) -> f64 {
        match self {
            Criterion::Tss => m.tss,
            Criterion::Acc => m.acc,
        }
    }

    /// Largest attainable score.
    pub fn ceiling(self) -> f64 {
        match self {
            Criterion::Tss => 2.0,
            Criterion::Acc => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SffsStep {
    pub kind: StepKind,
    pub feature: usize,
    pub size: usize,
    pub score: f64,
    /// Subset after the step.
    pub subset: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SffsOutcome {
    /// Best subset seen, as column indices in insertion order.
    pub chosen: Vec<usize>,
    pub score: f64,
    pub steps: Vec<SffsStep>,
    /// Best score so far after each accepted step.
    pub best_so_far: Vec<f64>,
}

struct Wrapper<'a> {
    columns: &'a [&'a [f64]],
    labels: &'a [bool],
    forest: &'a ForestConfig,
    criterion: Criterion,
}

impl Wrapper<'_> {
    fn evaluate(&self, subset: &[usize]) -> Option<f64> {
        let cols: Vec<&[f64]> = subset.iter().map(|&j| self.columns[j]).collect();
        match loo_evaluate(self.forest, &cols, self.labels) {
            Ok(m) => Some(self.criterion.score(&m)),
            Err(e) => {
                log::warn!("criterion failed on subset {subset:?}: {e}");
                None
            }
        }
    }

    /// Best of `options`; ties keep the earliest.
    ///
    /// Options are scored in order, a chunk at a time, and scoring stops after
    /// a chunk that reaches the criterion ceiling. Nothing later can beat it,
    /// so the result equals scoring every option.
    fn best_of(&self, options: Vec<(usize, Vec<usize>)>) -> Option<(usize, Vec<usize>, f64)> {
        let chunk = (4 * rayon::current_num_threads()).max(8);
        let mut best: Option<(usize, Vec<usize>, f64)> = None;
        let mut pending = options.into_iter().peekable();
        while pending.peek().is_some() {
            let batch: Vec<(usize, Vec<usize>)> = pending.by_ref().take(chunk).collect();
            let scored: Vec<(usize, Vec<usize>, Option<f64>)> = batch
                .into_par_iter()
                .map(|(f, s)| {
                    let score = self.evaluate(&s);
                    (f, s, score)
                })
                .collect();
            for (f, s, score) in scored {
                if let Some(score) = score {
                    if best.as_ref().is_none_or(|b| score > b.2) {
                        best = Some((f, s, score));
                    }
                }
            }
            if best.as_ref().is_some_and(|b| b.2 >= self.criterion.ceiling()) {
                break;
            }
        }
        best
    }
}

/// Floating forward search over `candidates` (in priority order).
///
/// Each round adds the best candidate, then removes features while a removal
/// beats the best score recorded for the smaller size. The search stops at
/// `max_size` or when the best addition does not beat the best score so far.
pub fn sffs(
    columns: &[&[f64]],
    labels: &[bool],
    candidates: &[usize],
    max_size: usize,
    forest: &ForestConfig,
    criterion: Criterion,
) -> Result<SffsOutcome, SelectionError> {
    if candidates.is_empty() {
        return Err(SelectionError::NoFeatures);
    }
    if max_size == 0 {
        return Err(SelectionError::InvalidConfig("max_size must be positive".into()));
    }
    let wrapper = Wrapper {
        columns,
        labels,
        forest,
        criterion,
    };
    let max_size = max_size.min(candidates.len());
    // best_by_size[k]: best (score, subset) recorded with k features.
    let mut best_by_size: Vec<Option<(f64, Vec<usize>)>> = vec![None; max_size + 1];
    let mut current: Vec<usize> = Vec::new();
    let mut best_score = f64::NEG_INFINITY;
    let mut steps = Vec::new();
    let mut best_so_far = Vec::new();

    while current.len() < max_size && best_score < criterion.ceiling() {
        let options: Vec<(usize, Vec<usize>)> = candidates
            .iter()
            .filter(|f| !current.contains(f))
            .map(|&f| {
                let mut s = current.clone();
                s.push(f);
                (f, s)
            })
            .collect();
        let Some((added, subset, score)) = wrapper.best_of(options) else {
            break;
        };
        if score <= best_score {
            break;
        }
        current = subset;
        best_score = score;
        let k = current.len();
        best_by_size[k] = Some((score, current.clone()));
        steps.push(SffsStep { kind: StepKind::Add, feature: added, size: k, score, subset: current.clone() });
        best_so_far.push(best_score);

        // Conditional exclusion; the feature just added stays.
        while current.len() > 2 {
            let options: Vec<(usize, Vec<usize>)> = current
                .iter()
                .filter(|&&f| f != added)
                .map(|&f| (f, current.iter().copied().filter(|&g| g != f).collect()))
                .collect();
            let Some((removed, subset, score)) = wrapper.best_of(options) else {
                break;
            };
            let k = subset.len();
            if best_by_size[k].as_ref().is_some_and(|b| score <= b.0) {
                break;
            }
            current = subset;
            best_by_size[k] = Some((score, current.clone()));
            best_score = best_score.max(score);
            steps.push(SffsStep { kind: StepKind::Remove, feature: removed, size: k, score, subset: current.clone() });
            best_so_far.push(best_score);
        }
    }
    // Highest score; ties go to the smaller subset.
    let (score, chosen) = best_by_size
        .into_iter()
        .flatten()
        .fold(None::<(f64, Vec<usize>)>, |acc, (s, sub)| match acc {
            Some((bs, _)) if bs >= s => acc,
            _ => Some((s, sub)),
        })
        .ok_or(SelectionError::CriterionFailed)?;
    Ok(SffsOutcome {
        chosen,
        score,
        steps,
        best_so_far,
    })
}
