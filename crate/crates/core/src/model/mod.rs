//! Random-forest classification, leave-one-out evaluation and metrics.
//!
//! The positive class is PD (`true`).

mod forest;

pub use forest::{train_forest, Forest, ForestConfig, Tree};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("training set needs at least two samples of each class")]
    SingleClass,
    #[error("dataset shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite feature value")]
    NonFinite,
    #[error("leave-one-out needs at least {needed} samples, got {got}")]
    TooFewSamples { got: usize, needed: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// A fitted classifier over column-major data.
pub trait Predictor {
    fn predict(&self, columns: &[&[f64]], row: usize) -> bool;
}

/// A training procedure. `subset` lists the rows used for fitting.
pub trait Learner: Sync {
    type Model: Predictor + Send;
    fn fit(&self, columns: &[&[f64]], labels: &[bool], subset: &[usize]) -> Result<Self::Model, ModelError>;
}

pub(crate) fn check_training_set(columns: &[&[f64]], labels: &[bool], subset: &[usize]) -> Result<(), ModelError> {
    if columns.is_empty() {
        return Err(ModelError::Shape("no features".into()));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != labels.len()) {
        return Err(ModelError::Shape(format!("column of {} rows vs {} labels", c.len(), labels.len())));
    }
    if subset.iter().any(|&i| i >= labels.len()) {
        return Err(ModelError::Shape("row index out of range".into()));
    }
    if subset.iter().any(|&i| columns.iter().any(|c| !c[i].is_finite())) {
        return Err(ModelError::NonFinite);
    }
    let pos = subset.iter().filter(|&&i| labels[i]).count();
    if pos < 2 || subset.len() - pos < 2 {
        return Err(ModelError::SingleClass);
    }
    Ok(())
}

/// Subject-major rows to columns.
pub fn to_columns(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = rows.first().map_or(0, Vec::len);
    (0..d).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// Always predicts the training majority (ties to PD).
#[derive(Debug, Clone, Copy, Default)]
pub struct MajorityClass;

#[derive(Debug, Clone, Copy)]
pub struct ConstantPredictor(pub bool);

impl Predictor for ConstantPredictor {
    fn predict(&self, _: &[&[f64]], _: usize) -> bool {
        self.0
    }
}

impl Learner for MajorityClass {
    type Model = ConstantPredictor;
    fn fit(&self, _: &[&[f64]], labels: &[bool], subset: &[usize]) -> Result<ConstantPredictor, ModelError> {
        let pos = subset.iter().filter(|&&i| labels[i]).count();
        Ok(ConstantPredictor(2 * pos >= subset.len()))
    }
}

/// `2^(sin(π·sen/2) · sin(π·spe/2))`.
pub fn tss(sen: f64, spe: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    2f64.powf((FRAC_PI_2 * sen).sin() * (FRAC_PI_2 * spe).sin())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl Confusion {
    pub fn from_predictions(truth: &[bool], predicted: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            match (t, p) {
                (true, true) => c.tp += 1,
                (true, false) => c.fn_ += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fp += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.tn + self.fp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub acc: f64,
    pub sen: f64,
    pub spe: f64,
    pub tss: f64,
    pub confusion: Confusion,
}

impl ClassMetrics {
    /// A class absent from `truth` contributes a rate of 0.
    pub fn from_confusion(c: Confusion) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let sen = ratio(c.tp, c.tp + c.fn_);
        let spe = ratio(c.tn, c.tn + c.fp);
        Self {
            acc: ratio(c.tp + c.tn, c.total()),
            sen,
            spe,
            tss: tss(sen, spe),
            confusion: c,
        }
    }

    pub fn from_predictions(truth: &[bool], predicted: &[bool]) -> Self {
        Self::from_confusion(Confusion::from_predictions(truth, predicted))
    }
}

pub const MIN_LOO_SAMPLES: usize = 10;

/// Leave-one-out predictions, one per row, in row order.
pub fn loo_predictions<L: Learner>(learner: &L, columns: &[&[f64]], labels: &[bool]) -> Result<Vec<bool>, ModelError> {
    let n = labels.len();
    if n < MIN_LOO_SAMPLES {
        return Err(ModelError::TooFewSamples { got: n, needed: MIN_LOO_SAMPLES });
    }
    (0..n)
        .into_par_iter()
        .map(|held_out| {
            let train: Vec<usize> = (0..n).filter(|&i| i != held_out).collect();
            let model = learner.fit(columns, labels, &train)?;
            Ok(model.predict(columns, held_out))
        })
        .collect()
}

/// Metrics over pooled leave-one-out predictions.
pub fn loo_evaluate<L: Learner>(learner: &L, columns: &[&[f64]], labels: &[bool]) -> Result<ClassMetrics, ModelError> {
    let predicted = loo_predictions(learner, columns, labels)?;
    Ok(ClassMetrics::from_predictions(labels, &predicted))
}

/// [`loo_evaluate`] for subject-major rows.
pub fn loo_evaluate_rows<L: Learner>(learner: &L, rows: &[Vec<f64>], labels: &[bool]) -> Result<ClassMetrics, ModelError> {
    let columns = to_columns(rows);
    let refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    loo_evaluate(learner, &refs, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn tss_corners() {
        assert_eq!(tss(1.0, 1.0), 2.0);
        assert_eq!(tss(1.0, 0.0), 1.0);
        assert!((tss(0.9048, 0.9388) - 1.98).abs() < 0.005);
    }

    proptest! {
        #[test]
        fn tss_symmetric(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
            prop_assert!((tss(a, b) - tss(b, a)).abs() <= 1e-15);
            prop_assert!((1.0..=2.0).contains(&tss(a, b)));
        }

        #[test]
        fn tss_increasing(a in 0.01..0.99f64, b in 0.01..=1.0f64, step in 1e-3..0.01f64) {
            prop_assert!(tss(a + step, b) > tss(a, b));
        }
    }

    #[test]
    fn metrics_from_confusion() {
        let truth = [true, true, true, false, false];
        let pred = [true, true, false, false, true];
        let m = ClassMetrics::from_predictions(&truth, &pred);
        assert_eq!(m.confusion, Confusion { tp: 2, fn_: 1, tn: 1, fp: 1 });
        assert!((m.acc - 0.6).abs() < 1e-15);
        assert!((m.sen - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.spe - 0.5).abs() < 1e-15);
    }

    fn cols(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        to_columns(rows)
    }

    #[test]
    fn majority_dummy_matches_prevalence() {
        // 14 PD, 6 HC: every fold trains on a PD majority.
        let labels: Vec<bool> = (0..20).map(|i| i < 14).collect();
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let c = cols(&rows);
        let refs: Vec<&[f64]> = c.iter().map(Vec::as_slice).collect();
        let m = loo_evaluate(&MajorityClass, &refs, &labels).unwrap();
        assert_eq!(m.acc, 0.7);
        assert_eq!(m.confusion.total(), 20);
    }

    struct AlwaysPd;
    impl Learner for AlwaysPd {
        type Model = ConstantPredictor;
        fn fit(&self, _: &[&[f64]], _: &[bool], _: &[usize]) -> Result<ConstantPredictor, ModelError> {
            Ok(ConstantPredictor(true))
        }
    }

    #[test]
    fn forced_pd_predictor() {
        let labels: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let m = loo_evaluate_rows(&AlwaysPd, &rows, &labels).unwrap();
        assert_eq!((m.sen, m.spe, m.tss), (1.0, 0.0, 1.0));
    }

    #[test]
    fn too_few_samples() {
        let rows = vec![vec![0.0]; 9];
        assert!(matches!(
            loo_evaluate_rows(&MajorityClass, &rows, &[true; 9]),
            Err(ModelError::TooFewSamples { got: 9, .. })
        ));
    }

    #[test]
    fn separable_loo_is_perfect() {
        let labels: Vec<bool> = (0..30).map(|i| i % 2 == 0).collect();
        let rows: Vec<Vec<f64>> = labels.iter().enumerate().map(|(i, &l)| vec![if l { 10.0 } else { 0.0 } + i as f64 * 0.01]).collect();
        let cfg = ForestConfig { n_trees: 50, ..Default::default() };
        let m = loo_evaluate_rows(&cfg, &rows, &labels).unwrap();
        assert_eq!((m.acc, m.sen, m.spe, m.tss), (1.0, 1.0, 1.0, 2.0));
    }

    #[test]
    fn permuted_labels_near_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut labels: Vec<bool> = (0..60).map(|i| i % 2 == 0).collect();
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| {
                let shift = if l { 1.5 } else { 0.0 };
                (0..3).map(|_| shift + Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect()
            })
            .collect();
        labels.shuffle(&mut rng);
        let cfg = ForestConfig { n_trees: 100, seed: 3, ..Default::default() };
        let m = loo_evaluate_rows(&cfg, &rows, &labels).unwrap();
        assert!((0.3..=0.7).contains(&m.acc), "acc {}", m.acc);
    }
}
