//! First-order regression (Δ) coefficients over frames.

use super::{FeatureFrameMatrix, PerceptualError};

/// `Δc[t] = sum_{k=1..K} k (c[t+k] - c[t-k]) / (2 sum k^2)`, with the first
/// and last frames replicated beyond the edges.
pub fn delta(m: &FeatureFrameMatrix, half_width: usize) -> Result<FeatureFrameMatrix, PerceptualError> {
    let n = m.n_frames();
    let needed = 2 * half_width + 1;
    if half_width == 0 {
        return Err(PerceptualError::InvalidParameter("half width must be positive".into()));
    }
    if n < needed {
        return Err(PerceptualError::TooFewFrames { frames: n, needed });
    }
    let denom = 2.0 * (1..=half_width).map(|k| (k * k) as f64).sum::<f64>();
    let at = |t: isize| &m.values[t.clamp(0, n as isize - 1) as usize];
    let values = (0..n as isize)
        .map(|t| {
            (0..m.n_coeffs())
                .map(|j| {
                    (1..=half_width as isize)
                        .map(|k| k as f64 * (at(t + k)[j] - at(t - k)[j]))
                        .sum::<f64>()
                        / denom
                })
                .collect()
        })
        .collect();
    FeatureFrameMatrix::new(m.family, true, values)
}
