//! Linear prediction.
//!
//! Sign convention, used everywhere in this crate: the inverse filter is
//! `A(z) = 1 + sum_k a[k] z^-k` and the predictor is
//! `x_hat[n] = -sum_k a[k] x[n-k]`. An AR(1) process `x[n] = 0.9 x[n-1] + e[n]`
//! therefore yields `a[1] = -0.9`.

use super::DspError;

/// Relative diagonal loading added to `r[0]` before the recursion.
const DIAGONAL_LOADING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LpcModel {
    pub order: usize,
    /// `a[1..=order]`; index 0 of this vector holds `a[1]`.
    pub coefficients: Vec<f64>,
    /// Square root of the final prediction-error energy.
    pub gain: f64,
    pub reflection: Vec<f64>,
}

impl LpcModel {
    /// Inverse-filter polynomial `[1, a1, ..., ap]`.
    pub fn polynomial(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.coefficients.iter().copied())
            .collect()
    }

    /// Apply the inverse filter, producing the prediction residual.
    pub fn residual(&self, signal: &[f64]) -> Vec<f64> {
        (0..signal.len())
            .map(|n| {
                let mut e = signal[n];
                for (k, &a) in self.coefficients.iter().enumerate() {
                    if n > k {
                        e += a * signal[n - k - 1];
                    }
                }
                e
            })
            .collect()
    }
}

/// Levinson-Durbin recursion on an autocorrelation sequence.
///
/// `r[0]` is loaded by `1e-9 * r[0]` so near-silent frames stay well posed.
pub fn levinson_durbin(r: &[f64], order: usize) -> Result<LpcModel, DspError> {
    if r.len() <= order {
        return Err(DspError::OrderTooHigh {
            order,
            needed: order + 1,
            got: r.len(),
        });
    }
    if !(r[0] > 0.0) || !r[0].is_finite() {
        return Err(DspError::DegenerateFrame);
    }
    let mut err = r[0] * (1.0 + DIAGONAL_LOADING);
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut reflection = Vec::with_capacity(order);
    let mut prev = a.clone();
    for i in 1..=order {
        let acc: f64 = r[i] + (1..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = -acc / err;
        prev.copy_from_slice(&a);
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
        reflection.push(k);
        if err <= 0.0 {
            return Err(DspError::DegenerateFrame);
        }
    }
    Ok(LpcModel {
        order,
        coefficients: a[1..].to_vec(),
        gain: err.sqrt(),
        reflection,
    })
}

/// Cepstrum of the all-pole model `gain / A(z)` by the standard recursion.
///
/// Returns `n_coeffs + 1` values: index 0 holds `c[0] = ln(gain^2)`, indices
/// `1..=n_coeffs` hold `c[n] = -a[n] - sum_{k<n} (k/n) c[k] a[n-k]`.
pub fn cepstrum_from_lpc(model: &LpcModel, n_coeffs: usize) -> Result<Vec<f64>, DspError> {
    if !(model.gain > 0.0) {
        return Err(DspError::ZeroGain);
    }
    let mut c = Vec::with_capacity(n_coeffs + 1);
    c.push((model.gain * model.gain).ln());
    c.extend(lpc_cepstrum(&model.coefficients, n_coeffs));
    Ok(c)
}

/// Unit-gain cepstrum `c[1..=n]` of `1 / A(z)` with `A = 1 + sum a[k] z^-k`.
pub fn lpc_cepstrum(a: &[f64], n: usize) -> Vec<f64> {
    let p = a.len();
    let mut c = vec![0.0; n + 1];
    for m in 1..=n {
        let mut acc = if m <= p { -a[m - 1] } else { 0.0 };
        for k in 1..m {
            let idx = m - k;
            if idx <= p {
                acc -= (k as f64 / m as f64) * c[k] * a[idx - 1];
            }
        }
        c[m] = acc;
    }
    c.split_off(1)
}
