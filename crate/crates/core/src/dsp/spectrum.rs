use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// In-place forward DFT (unnormalized).
pub fn fft_forward(buf: &mut [Complex<f64>]) {
    if !buf.is_empty() {
        plan(buf.len(), false).process(buf);
    }
}

/// In-place inverse DFT (unnormalized; divide by `len` to invert `fft_forward`).
pub fn fft_inverse(buf: &mut [Complex<f64>]) {
    if !buf.is_empty() {
        plan(buf.len(), true).process(buf);
    }
}

/// One-sided power spectrum `|X[k]|^2 / nfft` for `k = 0..=nfft/2`.
///
/// With this scaling, `P[0] + 2*sum(P[1..nfft/2]) + P[nfft/2]` equals the
/// frame energy.
///
/// # Panics
/// If `frame.len() > nfft` or `nfft` is odd.
pub fn power_spectrum(frame: &[f64], nfft: usize) -> Vec<f64> {
    assert!(frame.len() <= nfft, "frame longer than nfft");
    assert!(nfft % 2 == 0, "nfft must be even");
    let mut buf: Vec<Complex<f64>> = frame.iter().map(|&x| Complex::new(x, 0.0)).collect();
    buf.resize(nfft, Complex::new(0.0, 0.0));
    fft_forward(&mut buf);
    let scale = 1.0 / nfft as f64;
    buf[..=nfft / 2].iter().map(|c| c.norm_sqr() * scale).collect()
}

/// Biased autocorrelation `r[k] = sum_n x[n] x[n+k]` for `k = 0..=max_lag`.
pub fn autocorrelation(frame: &[f64], max_lag: usize) -> Vec<f64> {
    let n = frame.len();
    (0..=max_lag)
        .map(|k| {
            if k >= n {
                0.0
            } else {
                frame[..n - k]
                    .iter()
                    .zip(&frame[k..])
                    .map(|(a, b)| a * b)
                    .sum()
            }
        })
        .collect()
}

/// Orthonormal DCT-II, returning coefficients `0..n_out`.
pub fn dct2(input: &[f64], n_out: usize) -> Vec<f64> {
    let m = input.len() as f64;
    (0..n_out)
        .map(|k| {
            let scale = if k == 0 {
                (1.0 / m).sqrt()
            } else {
                (2.0 / m).sqrt()
            };
            scale
                * input
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| x * (PI * k as f64 * (i as f64 + 0.5) / m).cos())
                    .sum::<f64>()
        })
        .collect()
}

/// Inverse of [`dct2`] when all coefficients are present (orthonormal DCT-III).
pub fn idct2(coeffs: &[f64]) -> Vec<f64> {
    let m = coeffs.len() as f64;
    (0..coeffs.len())
        .map(|i| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let scale = if k == 0 {
                        (1.0 / m).sqrt()
                    } else {
                        (2.0 / m).sqrt()
                    };
                    scale * c * (PI * k as f64 * (i as f64 + 0.5) / m).cos()
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn direct_dft_power(frame: &[f64], nfft: usize) -> Vec<f64> {
        (0..=nfft / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (n, &x) in frame.iter().enumerate() {
                    let ph = -2.0 * PI * (k * n) as f64 / nfft as f64;
                    re += x * ph.cos();
                    im += x * ph.sin();
                }
                (re * re + im * im) / nfft as f64
            })
            .collect()
    }

    #[test]
    fn zero_frame_has_zero_spectrum() {
        assert!(power_spectrum(&[0.0; 100], 128).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn impulse_is_flat() {
        let mut frame = vec![0.0; 8];
        frame[0] = 1.0;
        let p = power_spectrum(&frame, 8);
        assert_eq!(p.len(), 5);
        for v in &p {
            assert_relative_eq!(*v, p[0], epsilon = 1e-15);
        }
    }

    #[test]
    fn bin_centred_sine_concentrates_energy() {
        let nfft = 256;
        let frame: Vec<f64> = (0..nfft)
            .map(|n| (2.0 * PI * 20.0 * n as f64 / nfft as f64).sin())
            .collect();
        let oracle = direct_dft_power(&frame, nfft);
        let total: f64 = oracle.iter().sum();
        let peak = oracle.iter().cloned().fold(0.0, f64::max);
        assert!(peak / total >= 0.99);
        let fast = power_spectrum(&frame, nfft);
        for (a, b) in fast.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
        let argmax = fast
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmax, 20);
    }

    #[test]
    fn parseval_on_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let len = rng.random_range(10..400);
            let nfft = next_pow2(len);
            let frame: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = power_spectrum(&frame, nfft);
            let spectral = p[0] + p[nfft / 2] + 2.0 * p[1..nfft / 2].iter().sum::<f64>();
            let energy: f64 = frame.iter().map(|x| x * x).sum();
            assert!(((spectral - energy) / energy).abs() < 1e-6);
        }
    }

    #[test]
    fn autocorrelation_of_constant() {
        let c = 0.7;
        let n = 50;
        let r = autocorrelation(&vec![c; n], 10);
        for (k, v) in r.iter().enumerate() {
            assert_relative_eq!(*v, c * c * (n - k) as f64, epsilon = 1e-12);
        }
        assert!(autocorrelation(&[0.0; 20], 5).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn autocorrelation_peaks_at_period() {
        let period = 25;
        let frame: Vec<f64> = (0..400)
            .map(|n| {
                let ph = 2.0 * PI * n as f64 / period as f64;
                ph.sin() + 0.5 * (2.0 * ph).cos()
            })
            .collect();
        let r = autocorrelation(&frame, 40);
        // brute-force shift-multiply oracle
        for (k, v) in r.iter().enumerate() {
            let brute: f64 = (0..frame.len() - k).map(|n| frame[n] * frame[n + k]).sum();
            assert_relative_eq!(*v, brute, epsilon = 1e-9);
        }
        assert!(r[period] > r[period - 1] && r[period] > r[period + 1]);
        assert!(r.iter().all(|v| r[0] >= v.abs()));
        assert_relative_eq!(r[0], frame.iter().map(|x| x * x).sum::<f64>(), epsilon = 1e-9);
    }

    #[test]
    fn dct_round_trip() {
        let x = [0.3, -1.2, 4.0, 0.0, 2.5, -0.7, 1.1];
        let back = idct2(&dct2(&x, x.len()));
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dct_of_constant_is_dc_only() {
        let c = dct2(&[2.0; 16], 16);
        assert_relative_eq!(c[0], 2.0 * 4.0, epsilon = 1e-12);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
    }
}
