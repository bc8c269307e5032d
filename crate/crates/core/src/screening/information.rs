//! Mutual information by equal-frequency binning with Miller-Madow correction.

use super::correlation::mid_ranks;
use super::ScreeningError;

pub const MIN_MI_N: usize = 10;

/// Default bin count, `floor(sqrt(n / 2))`, at least 2.
pub fn default_bins(n: usize) -> usize {
    ((n as f64 / 2.0).sqrt().floor() as usize).max(2)
}

/// Equal-frequency bin codes from mid-ranks. Tied values share a bin, and any
/// strictly monotone transform of `values` yields the same codes.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len() as f64;
    mid_ranks(values)
        .into_iter()
        .map(|r| (((r - 0.5) * bins as f64 / n).floor() as usize).min(bins - 1))
        .collect()
}

fn x_ln_x(c: usize) -> f64 {
    if c == 0 {
        0.0
    } else {
        let c = c as f64;
        c * c.ln()
    }
}

/// Corrected MI from a joint count table (row-major, `ca.len()` rows) and
/// its marginals, whose `sum c ln c` terms are passed in.
fn mi_from_counts(joint: &[usize], ca: &[usize], cb: &[usize], n: usize, marginal_terms: (f64, f64)) -> f64 {
    let nb = cb.len();
    let rank_one = ca
        .iter()
        .enumerate()
        .all(|(i, &ci)| cb.iter().enumerate().all(|(j, &cj)| n * joint[i * nb + j] == ci * cj));
    if rank_one {
        return 0.0;
    }
    let nf = n as f64;
    let joint_term: f64 = joint.iter().map(|&c| x_ln_x(c)).sum();
    // I = H(a) + H(b) - H(a, b) with H = ln n - sum(c ln c) / n.
    let plug_in = (joint_term - marginal_terms.0 - marginal_terms.1) / nf + nf.ln();
    let occupied = |v: &[usize]| v.iter().filter(|&&c| c > 0).count() as f64;
    // Miller-Madow adds (m - 1) / 2n to each entropy.
    let correction = (occupied(ca) - 1.0 + occupied(cb) - 1.0 - (occupied(joint) - 1.0)) / (2.0 * nf);
    ((plug_in + correction) / std::f64::consts::LN_2).max(0.0)
}

/// Bin codes with cached marginal counts, for repeated pairwise MI.
#[derive(Debug, Clone)]
pub(crate) struct Binned {
    codes: Vec<usize>,
    counts: Vec<usize>,
    term: f64,
}

impl Binned {
    pub(crate) fn new(codes: Vec<usize>) -> Self {
        let levels = codes.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![0; levels];
        for &c in &codes {
            counts[c] += 1;
        }
        let term = counts.iter().map(|&c| x_ln_x(c)).sum();
        Self { codes, counts, term }
    }

    pub(crate) fn from_values(values: &[f64], bins: usize) -> Self {
        Self::new(equal_frequency_bins(values, bins))
    }

    pub(crate) fn from_labels(labels: &[bool]) -> Self {
        Self::new(labels.iter().map(|&l| l as usize).collect())
    }

    /// Same value as [`discrete_mutual_information`] on the two code vectors.
    /// `joint` is scratch space.
    pub(crate) fn mutual_information(&self, other: &Binned, joint: &mut Vec<usize>) -> f64 {
        let nb = other.counts.len();
        joint.clear();
        joint.resize(self.counts.len() * nb, 0);
        for (&i, &j) in self.codes.iter().zip(&other.codes) {
            joint[i * nb + j] += 1;
        }
        mi_from_counts(joint, &self.counts, &other.counts, self.codes.len(), (self.term, other.term))
    }
}

/// Miller-Madow corrected mutual information (bits) between two code
/// vectors, clipped at 0. A rank-one contingency table gives exactly 0.
pub fn discrete_mutual_information(a: &[usize], b: &[usize]) -> f64 {
    Binned::new(a.to_vec()).mutual_information(&Binned::new(b.to_vec()), &mut Vec::new())
}

/// MI (bits) between a feature and binary labels; `None` when a class is
/// missing. `bins = None` uses [`default_bins`].
pub fn mutual_information(x: &[f64], labels: &[bool], bins: Option<usize>) -> Result<Option<f64>, ScreeningError> {
    if x.len() != labels.len() {
        return Err(ScreeningError::LengthMismatch(x.len(), labels.len()));
    }
    if x.len() < MIN_MI_N {
        return Err(ScreeningError::TooFewSamples { got: x.len(), needed: MIN_MI_N });
    }
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Ok(None);
    }
    let binned = Binned::from_values(x, bins.unwrap_or_else(|| default_bins(x.len())).max(1));
    Ok(Some(binned.mutual_information(&Binned::from_labels(labels), &mut Vec::new())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_balanced() {
        let labels: Vec<bool> = (0..200).map(|i| i % 2 == 0).collect();
        let x: Vec<f64> = labels.iter().enumerate().map(|(i, &l)| l as u8 as f64 * 10.0 + i as f64 * 1e-3).collect();
        let mi = mutual_information(&x, &labels, None).unwrap().unwrap();
        assert!((mi - 1.0).abs() <= 0.05, "{mi}");
        let binary: Vec<f64> = labels.iter().map(|&l| l as u8 as f64).collect();
        let mi = mutual_information(&binary, &labels, None).unwrap().unwrap();
        assert!((mi - 1.0).abs() <= 0.05, "{mi}");
    }

    #[test]
    fn independent_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x: Vec<f64> = (0..1000).map(|_| rng.random()).collect();
            let y: Vec<bool> = (0..1000).map(|_| rng.random()).collect();
            assert!(mutual_information(&x, &y, None).unwrap().unwrap() <= 0.05);
        }
    }

    #[test]
    fn rank_one_table_is_exactly_zero() {
        // Every bin holds one of each label.
        let x: Vec<f64> = (0..20).map(|i| (i / 2) as f64).collect();
        let y: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
        assert_eq!(mutual_information(&x, &y, Some(5)).unwrap(), Some(0.0));
    }

    #[test]
    fn single_class_absent() {
        assert_eq!(mutual_information(&[1.0; 12], &[true; 12], None).unwrap(), None);
        assert!(mutual_information(&[1.0; 9], &[true; 9], None).is_err());
    }

    #[test]
    fn plug_in_matches_direct_sum() {
        let a = [0, 0, 1, 1, 2, 2, 0, 1, 2, 2, 1, 0];
        let b = [0, 1, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0];
        let n = a.len() as f64;
        let count = |f: &dyn Fn(usize) -> bool| (0..a.len()).filter(|&k| f(k)).count() as f64;
        let mut direct = 0.0;
        let mut cells = 0.0;
        for i in 0..3 {
            for j in 0..2 {
                let c = count(&|k| a[k] == i && b[k] == j);
                if c > 0.0 {
                    cells += 1.0;
                    let ci = count(&|k| a[k] == i);
                    let cj = count(&|k| b[k] == j);
                    direct += c / n * (c * n / (ci * cj)).log2();
                }
            }
        }
        let expected = (direct + (2.0 + 1.0 - (cells - 1.0)) / (2.0 * n * std::f64::consts::LN_2)).max(0.0);
        assert!(expected > 0.0);
        assert!((discrete_mutual_information(&a, &b) - expected).abs() < 1e-12);
    }

    #[test]
    fn bins_are_equal_frequency() {
        let x: Vec<f64> = (0..20).map(|i| ((i * 7) % 20) as f64).collect();
        let codes = equal_frequency_bins(&x, 4);
        for b in 0..4 {
            assert_eq!(codes.iter().filter(|&&c| c == b).count(), 5);
        }
    }

    proptest! {
        #[test]
        fn monotone_invariant_and_nonnegative(
            v in prop::collection::vec((-50.0..50.0f64, any::<bool>()), 10..80)
        ) {
            let (x, y): (Vec<f64>, Vec<bool>) = v.into_iter().unzip();
            prop_assume!(y.iter().any(|&l| l) && y.iter().any(|&l| !l));
            let a = mutual_information(&x, &y, None).unwrap().unwrap();
            let xt: Vec<f64> = x.iter().map(|v| (v / 10.0).exp()).collect();
            let b = mutual_information(&xt, &y, None).unwrap().unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!((a - b).abs() <= 1e-9);
        }

        #[test]
        fn zero_iff_rank_one(a in prop::collection::vec(0usize..3, 10..40), b in prop::collection::vec(0usize..2, 10..40)) {
            let n = a.len().min(b.len());
            let (a, b) = (&a[..n], &b[..n]);
            let mi = discrete_mutual_information(a, b);
            let count = |f: &dyn Fn(usize) -> bool| (0..n).filter(|&k| f(k)).count();
            let rank_one = (0..3).all(|i| (0..2).all(|j| {
                n * count(&|k| a[k] == i && b[k] == j) == count(&|k| a[k] == i) * count(&|k| b[k] == j)
            }));
            if rank_one {
                prop_assert_eq!(mi, 0.0);
            }
            prop_assert!(mi >= 0.0);
        }
    }
}
