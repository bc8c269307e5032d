//! Mann-Whitney U test with exact small-sample p-values.

use super::correlation::mid_ranks;
use super::ScreeningError;
use statrs::function::erf::erfc;

/// Largest `n_a * n_b` that uses the exact null distribution.
pub const EXACT_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U of the first sample: pairs with `a > b`, plus half the ties.
    pub u: f64,
    /// Two-sided.
    pub p_value: f64,
    pub exact: bool,
}

/// Two-sided test of `a` against `b`, tie-corrected.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney, ScreeningError> {
    if a.is_empty() || b.is_empty() {
        return Err(ScreeningError::EmptyGroup);
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = mid_ranks(&pooled);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let u = rank_sum_a - (na * (na + 1)) as f64 / 2.0;
    if na * nb <= EXACT_LIMIT {
        let p_value = exact_p(&ranks, na);
        return Ok(MannWhitney { u, p_value, exact: true });
    }
    let n = (na + nb) as f64;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let (naf, nbf) = (na as f64, nb as f64);
    let variance = naf * nbf / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let p_value = if variance <= 0.0 {
        1.0
    } else {
        let z = ((u - naf * nbf / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
        erfc(z / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0)
    };
    Ok(MannWhitney { u, p_value, exact: false })
}

/// Exact two-sided p from the permutation distribution of the first group's
/// rank sum, counted by dynamic programming over doubled mid-ranks.
fn exact_p(ranks: &[f64], na: usize) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let observed: usize = doubled[..na].iter().sum();
    let max_sum: usize = doubled.iter().sum();
    // ways[k][s]: subsets of size k with doubled rank sum s.
    let mut ways = vec![vec![0u128; max_sum + 1]; na + 1];
    ways[0][0] = 1;
    for &r in &doubled {
        for k in (1..=na).rev() {
            let (lower, upper) = ways.split_at_mut(k);
            let (prev, cur) = (&lower[k - 1], &mut upper[0]);
            for s in (r..=max_sum).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let counts = &ways[na];
    let total: u128 = counts.iter().sum();
    let lower: u128 = counts[..=observed].iter().sum();
    let upper: u128 = counts[observed..].iter().sum();
    (2.0 * lower.min(upper) as f64 / total as f64).min(1.0)
}
