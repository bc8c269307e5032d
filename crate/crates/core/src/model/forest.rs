//! CART trees with Gini splits, bagged into a random forest.

use super::{check_training_set, Learner, ModelError, Predictor};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` selects `floor(sqrt(d))`, at least 1.
    pub max_features_per_split: Option<usize>,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 500,
            max_features_per_split: None,
            min_leaf: 1,
            seed: 0,
        }
    }
}

impl ForestConfig {
    fn mtry(&self, d: usize) -> usize {
        self.max_features_per_split
            .unwrap_or_else(|| (d as f64).sqrt().floor() as usize)
            .clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(bool),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, columns: &[&[f64]], row: usize) -> bool {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(label) => return label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if columns[feature][row] <= threshold { left } else { right },
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    columns: &'a [&'a [f64]],
    labels: &'a [bool],
    mtry: usize,
    min_leaf: usize,
    nodes: Vec<Node>,
    scratch: Vec<(f64, bool)>,
}

impl Builder<'_> {
    /// Best split of `samples` on `feature`: (weighted impurity, threshold).
    fn best_split_on(&mut self, samples: &[usize], feature: usize) -> Option<(f64, f64)> {
        let col = self.columns[feature];
        self.scratch.clear();
        self.scratch.extend(samples.iter().map(|&i| (col[i], self.labels[i])));
        self.scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = self.scratch.len();
        let total_pos = self.scratch.iter().filter(|s| s.1).count();
        let mut left_pos = 0;
        let mut best: Option<(f64, f64)> = None;
        for i in 1..n {
            if self.scratch[i - 1].1 {
                left_pos += 1;
            }
            let (lo, hi) = (self.scratch[i - 1].0, self.scratch[i].0);
            if lo == hi || i < self.min_leaf || n - i < self.min_leaf {
                continue;
            }
            let impurity = (i as f64 * gini(left_pos, i) + (n - i) as f64 * gini(total_pos - left_pos, n - i)) / n as f64;
            if best.is_none_or(|b| impurity < b.0) {
                let mid = lo + (hi - lo) / 2.0;
                // Guard against the midpoint rounding onto the upper value.
                let threshold = if mid < hi { mid } else { lo };
                best = Some((impurity, threshold));
            }
        }
        best
    }

    fn build(&mut self, samples: Vec<usize>, rng: &mut ChaCha8Rng) -> usize {
        let pos = samples.iter().filter(|&&i| self.labels[i]).count();
        let id = self.nodes.len();
        // Majority label; ties go to the positive class.
        self.nodes.push(Node::Leaf(2 * pos >= samples.len()));
        if pos == 0 || pos == samples.len() || samples.len() < 2 * self.min_leaf {
            return id;
        }
        let d = self.columns.len();
        // Visit features in random order; the first `mtry` are the split
        // candidates, further ones only if none of those can split.
        let order = sample(rng, d, d).into_vec();
        let mut best: Option<(f64, usize, f64)> = None;
        for (visited, &f) in order.iter().enumerate() {
            if visited >= self.mtry && best.is_some() {
                break;
            }
            if let Some((imp, thr)) = self.best_split_on(&samples, f) {
                if best.is_none_or(|b| imp < b.0) {
                    best = Some((imp, f, thr));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return id;
        };
        let col = self.columns[feature];
        let (l, r): (Vec<usize>, Vec<usize>) = samples.into_iter().partition(|&i| col[i] <= threshold);
        let left = self.build(l, rng);
        let right = self.build(r, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

fn grow_tree(columns: &[&[f64]], labels: &[bool], subset: &[usize], cfg: &ForestConfig, tree_index: u64) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(tree_index);
    let bootstrap: Vec<usize> = (0..subset.len()).map(|_| subset[rng.random_range(0..subset.len())]).collect();
    let mut b = Builder {
        columns,
        labels,
        mtry: cfg.mtry(columns.len()),
        min_leaf: cfg.min_leaf.max(1),
        nodes: Vec::new(),
        scratch: Vec::with_capacity(subset.len()),
    };
    b.build(bootstrap, &mut rng);
    Tree { nodes: b.nodes }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    /// Positive-class vote share for `row`.
    pub fn vote_share(&self, columns: &[&[f64]], row: usize) -> f64 {
        let votes = self.trees.iter().filter(|t| t.predict(columns, row)).count();
        votes as f64 / self.trees.len() as f64
    }
}

impl Predictor for Forest {
    /// Majority vote; a tie predicts the positive class.
    fn predict(&self, columns: &[&[f64]], row: usize) -> bool {
        self.vote_share(columns, row) >= 0.5
    }
}

impl Learner for ForestConfig {
    type Model = Forest;

    fn fit(&self, columns: &[&[f64]], labels: &[bool], subset: &[usize]) -> Result<Forest, ModelError> {
        check_training_set(columns, labels, subset)?;
        if self.n_trees == 0 {
            return Err(ModelError::InvalidConfig("n_trees must be positive".into()));
        }
        let trees = (0..self.n_trees as u64)
            .into_par_iter()
            .map(|t| grow_tree(columns, labels, subset, self, t))
            .collect();
        Ok(Forest { trees })
    }
}

/// Train on subject-major rows.
pub fn train_forest(rows: &[Vec<f64>], labels: &[bool], cfg: &ForestConfig) -> Result<Forest, ModelError> {
    let columns = super::to_columns(rows);
    let refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    let all: Vec<usize> = (0..rows.len()).collect();
    cfg.fit(&refs, labels, &all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn blobs(n: usize, sep: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let pos = i % 2 == 0;
            let c = if pos { sep / 2.0 } else { -sep / 2.0 };
            rows.push(vec![c + g(), c + g()]);
            labels.push(pos);
        }
        (rows, labels)
    }

    #[test]
    fn separable_blobs_fit_perfectly() {
        let (rows, labels) = blobs(40, 4.0 * 2f64.sqrt(), 1);
        let f = train_forest(&rows, &labels, &ForestConfig { n_trees: 100, ..Default::default() }).unwrap();
        let cols = super::super::to_columns(&rows);
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        for (i, &l) in labels.iter().enumerate() {
            assert_eq!(f.predict(&refs, i), l);
        }
    }

    #[test]
    fn same_seed_same_forest() {
        let (rows, labels) = blobs(30, 1.0, 2);
        let cfg = ForestConfig { n_trees: 20, seed: 99, ..Default::default() };
        let a = train_forest(&rows, &labels, &cfg).unwrap();
        let b = train_forest(&rows, &labels, &cfg).unwrap();
        assert_eq!(a, b);
        let grid: Vec<Vec<f64>> = (0..100).map(|i| vec![(i % 10) as f64 - 5.0, (i / 10) as f64 - 5.0]).collect();
        let cols = super::super::to_columns(&grid);
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        for i in 0..100 {
            assert_eq!(a.predict(&refs, i), b.predict(&refs, i));
        }
        let c = train_forest(&rows, &labels, &ForestConfig { seed: 100, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_class_rejected() {
        let rows = vec![vec![1.0]; 6];
        assert!(matches!(train_forest(&rows, &[true; 6], &ForestConfig::default()), Err(ModelError::SingleClass)));
    }

    #[test]
    fn constant_features_give_stumps() {
        let rows = vec![vec![1.0]; 6];
        let labels = [true, false, true, false, true, true];
        let f = train_forest(&rows, &labels, &ForestConfig { n_trees: 5, ..Default::default() }).unwrap();
        assert!(f.trees.iter().all(|t| t.n_nodes() == 1));
    }

    #[test]
    fn threshold_between_adjacent_floats() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let rows = vec![vec![a], vec![a], vec![b], vec![b]];
        let labels = [false, false, true, true];
        let f = train_forest(&rows, &labels, &ForestConfig { n_trees: 30, ..Default::default() }).unwrap();
        let cols = super::super::to_columns(&rows);
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        // Every tree whose bootstrap held both values must separate them.
        assert!(f.predict(&refs, 2) && !f.predict(&refs, 0));
    }
}
