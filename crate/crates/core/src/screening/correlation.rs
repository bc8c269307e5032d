//! Rank correlation: Spearman and partial Spearman.

use super::ScreeningError;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

pub const MIN_SPEARMAN_N: usize = 5;

/// Average (mid) ranks starting at 1. NaN compares greater than every number.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub rho: f64,
    pub p_value: f64,
}

/// Pearson correlation; `None` when either input has zero variance.
pub(crate) fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided p of `r` under the t approximation with `df` degrees of freedom.
pub(crate) fn t_test_p(r: f64, df: f64) -> f64 {
    let denom = 1.0 - r * r;
    if denom <= 0.0 {
        return f64::MIN_POSITIVE;
    }
    let t = r.abs() * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
    (2.0 * dist.sf(t)).clamp(f64::MIN_POSITIVE, 1.0)
}

fn check_pair(x: &[f64], y: &[f64], needed: usize) -> Result<(), ScreeningError> {
    if x.len() != y.len() {
        return Err(ScreeningError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < needed {
        return Err(ScreeningError::TooFewSamples { got: x.len(), needed });
    }
    Ok(())
}

/// Spearman's rho with a two-sided t-approximation p. `None` when either
/// variable's ranks are constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<Correlation>, ScreeningError> {
    check_pair(x, y, MIN_SPEARMAN_N)?;
    let Some(rho) = pearson(&mid_ranks(x), &mid_ranks(y)) else {
        return Ok(None);
    };
    Ok(Some(Correlation {
        rho,
        p_value: t_test_p(rho, x.len() as f64 - 2.0),
    }))
}

/// Spearman's rho with a permutation p-value, `(1 + #{|rho*| >= |rho|}) / (1 + permutations)`.
/// Meant for small samples.
pub fn spearman_permutation(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<Option<Correlation>, ScreeningError> {
    check_pair(x, y, MIN_SPEARMAN_N)?;
    let rx = mid_ranks(x);
    let mut ry = mid_ranks(y);
    let Some(rho) = pearson(&rx, &ry) else {
        return Ok(None);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0usize;
    for _ in 0..permutations {
        ry.shuffle(&mut rng);
        let r = pearson(&rx, &ry).unwrap_or(0.0);
        if r.abs() >= rho.abs() - 1e-12 {
            extreme += 1;
        }
    }
    Ok(Some(Correlation {
        rho,
        p_value: (1 + extreme) as f64 / (1 + permutations) as f64,
    }))
}

/// Residuals of `target` after least squares on an intercept plus the
/// orthonormal basis `basis` (whose vectors are centred).
fn residualize(target: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let n = target.len() as f64;
    let mean = target.iter().sum::<f64>() / n;
    let mut r: Vec<f64> = target.iter().map(|v| v - mean).collect();
    for q in basis {
        let coef: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
        for (ri, qi) in r.iter_mut().zip(q) {
            *ri -= coef * qi;
        }
    }
    r
}

/// Relative norm below which a covariate counts as collinear with earlier ones.
const COLLINEAR_TOLERANCE: f64 = 1e-9;

/// Spearman correlation of `x` and `y` after removing the rank-linear effect
/// of `covariates`. Constant or collinear covariates are dropped with a
/// warning; with nothing left this is exactly [`spearman`].
pub fn partial_spearman(x: &[f64], y: &[f64], covariates: &[Vec<f64>]) -> Result<Option<Correlation>, ScreeningError> {
    check_pair(x, y, covariates.len() + MIN_SPEARMAN_N)?;
    if let Some(c) = covariates.iter().find(|c| c.len() != x.len()) {
        return Err(ScreeningError::LengthMismatch(x.len(), c.len()));
    }
    // Modified Gram-Schmidt on centred covariate ranks.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (k, cov) in covariates.iter().enumerate() {
        let ranks = mid_ranks(cov);
        let scale = ranks.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut v = residualize(&ranks, &basis);
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm <= COLLINEAR_TOLERANCE * scale {
            log::warn!("covariate {k} is constant or collinear with earlier covariates; dropped");
            continue;
        }
        v.iter_mut().for_each(|a| *a /= norm);
        basis.push(v);
    }
    if basis.is_empty() {
        return spearman(x, y);
    }
    let rx = residualize(&mid_ranks(x), &basis);
    let ry = residualize(&mid_ranks(y), &basis);
    let Some(rho) = pearson(&rx, &ry) else {
        return Ok(None);
    };
    let df = x.len() as f64 - 2.0 - basis.len() as f64;
    Ok(Some(Correlation {
        rho,
        p_value: t_test_p(rho, df),
    }))
}
