//! Greedy minimum-redundancy maximum-relevance ranking.

use super::SelectionError;
use crate::screening::{default_bins, Binned};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MrmrScheme {
    /// Relevance minus mean redundancy.
    #[default]
    Mid,
    /// Relevance over mean redundancy.
    Miq,
}

/// Indices of up to `k` columns in selection order.
///
/// The first pick maximizes MI with the labels; later picks maximize the
/// scheme's score against the picks so far. Equal scores go to the lower
/// mean redundancy, then to the smaller name.
pub fn mrmr(
    columns: &[&[f64]],
    names: &[String],
    labels: &[bool],
    k: usize,
    scheme: MrmrScheme,
    bins: Option<usize>,
) -> Result<Vec<usize>, SelectionError> {
    let d = columns.len();
    if d == 0 {
        return Err(SelectionError::NoFeatures);
    }
    if names.len() != d || columns.iter().any(|c| c.len() != labels.len()) {
        return Err(SelectionError::Shape);
    }
    if !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
        return Err(SelectionError::SingleClass);
    }
    let k = if k > d {
        log::warn!("mRMR asked for {k} of {d} features; selecting all");
        d
    } else {
        k
    };
    let bins = bins.unwrap_or_else(|| default_bins(labels.len())).max(1);
    let binned: Vec<Binned> = columns.par_iter().map(|c| Binned::from_values(c, bins)).collect();
    let target = Binned::from_labels(labels);
    let relevance: Vec<f64> = binned.par_iter().map(|b| b.mutual_information(&target, &mut Vec::new())).collect();

    let mut redundancy = vec![0.0; d];
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut taken = vec![false; d];
    while chosen.len() < k {
        let m = chosen.len() as f64;
        let score = |j: usize| -> (f64, f64) {
            if chosen.is_empty() {
                return (relevance[j], 0.0);
            }
            let mean = redundancy[j] / m;
            let s = match scheme {
                MrmrScheme::Mid => relevance[j] - mean,
                MrmrScheme::Miq => relevance[j] / mean.max(f64::EPSILON),
            };
            (s, mean)
        };
        let best = (0..d)
            .filter(|&j| !taken[j])
            .max_by(|&a, &b| {
                let ((sa, ra), (sb, rb)) = (score(a), score(b));
                sa.total_cmp(&sb).then(rb.total_cmp(&ra)).then(names[b].cmp(&names[a]))
            })
            .expect("fewer picks than features");
        chosen.push(best);
        taken[best] = true;
        if chosen.len() < k {
            let last = &binned[best];
            let added: Vec<(usize, f64)> = (0..d)
                .into_par_iter()
                .filter(|&j| !taken[j])
                .map_init(Vec::new, |scratch, j| (j, binned[j].mutual_information(last, scratch)))
                .collect();
            for (j, mi) in added {
                redundancy[j] += mi;
            }
        }
    }
    Ok(chosen)
}
