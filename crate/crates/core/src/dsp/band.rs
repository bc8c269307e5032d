use super::spectrum::{fft_forward, fft_inverse, next_pow2};
use rustfft::num_complex::Complex;
use std::f64::consts::PI;

/// Whole-signal spectrum used for zero-phase frequency-domain filtering.
///
/// The signal is zero-padded to at least twice its length so that filtering
/// wrap-around stays in the padding.
#[derive(Debug, Clone)]
pub struct SignalSpectrum {
    len: usize,
    sample_rate: f64,
    bins: Vec<Complex<f64>>,
}

impl SignalSpectrum {
    pub fn new(signal: &[f64], sample_rate: f64) -> Self {
        let nfft = next_pow2(2 * signal.len().max(1));
        let mut bins: Vec<Complex<f64>> = signal.iter().map(|&x| Complex::new(x, 0.0)).collect();
        bins.resize(nfft, Complex::new(0.0, 0.0));
        fft_forward(&mut bins);
        Self {
            len: signal.len(),
            sample_rate,
            bins,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn nfft(&self) -> usize {
        self.bins.len()
    }

    fn bin_freq(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate / self.nfft() as f64
    }

    /// Real signal after multiplying the spectrum by `gain(f)` (zero phase).
    pub fn filtered<G: Fn(f64) -> f64>(&self, gain: G) -> Vec<f64> {
        let nfft = self.nfft();
        let mut buf = vec![Complex::new(0.0, 0.0); nfft];
        for k in 0..=nfft / 2 {
            let g = gain(self.bin_freq(k));
            if g != 0.0 {
                buf[k] = self.bins[k] * g;
                if k != 0 && k != nfft / 2 {
                    buf[nfft - k] = self.bins[nfft - k] * g;
                }
            }
        }
        fft_inverse(&mut buf);
        let scale = 1.0 / nfft as f64;
        buf[..self.len].iter().map(|c| c.re * scale).collect()
    }

    /// Magnitude of the analytic signal after weighting by `gain(f)`.
    pub fn envelope<G: Fn(f64) -> f64>(&self, gain: G) -> Vec<f64> {
        let nfft = self.nfft();
        let mut buf = vec![Complex::new(0.0, 0.0); nfft];
        for (k, slot) in buf.iter_mut().enumerate().take(nfft / 2 + 1) {
            let g = gain(self.bin_freq(k));
            if g != 0.0 {
                let w = if k == 0 || k == nfft / 2 { 1.0 } else { 2.0 };
                *slot = self.bins[k] * (g * w);
            }
        }
        fft_inverse(&mut buf);
        let scale = 1.0 / nfft as f64;
        buf[..self.len].iter().map(|c| c.norm() * scale).collect()
    }

    /// Analytic-signal magnitude of the band `(lo, hi)` weighted by
    /// `gain(f)`, sampled every `decim` input samples.
    ///
    /// Computed at the reduced rate directly: the band is shifted to
    /// baseband, which leaves the magnitude unchanged. Requires
    /// `hi - lo < sample_rate / decim`.
    pub fn band_envelope_decimated<G: Fn(f64) -> f64>(&self, lo: f64, hi: f64, decim: usize, gain: G) -> Vec<f64> {
        let nfft = self.nfft();
        let m = nfft / decim;
        assert!(
            hi - lo < self.sample_rate / decim as f64,
            "band wider than the decimated rate"
        );
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        let k_lo = (lo * nfft as f64 / self.sample_rate).floor().max(0.0) as usize;
        let k_hi = ((hi * nfft as f64 / self.sample_rate).ceil() as usize).min(nfft / 2);
        for k in k_lo..=k_hi {
            let g = gain(self.bin_freq(k));
            if g != 0.0 {
                let w = if k == 0 || k == nfft / 2 { 1.0 } else { 2.0 };
                buf[(k - k_lo) % m] += self.bins[k] * (g * w);
            }
        }
        fft_inverse(&mut buf);
        let scale = 1.0 / nfft as f64;
        buf.iter()
            .take(self.len.div_ceil(decim))
            .map(|c| c.norm() * scale)
            .collect()
    }

    /// Band-limited interpolation by an integer factor (zero-padding in
    /// frequency). Output sample `factor * n` equals input sample `n`.
    pub fn upsampled(&self, factor: usize) -> Vec<f64> {
        let nfft = self.nfft();
        let big = nfft * factor;
        let mut buf = vec![Complex::new(0.0, 0.0); big];
        let half = nfft / 2;
        buf[..half].copy_from_slice(&self.bins[..half]);
        for k in 1..half {
            buf[big - k] = self.bins[nfft - k];
        }
        // Split the Nyquist bin between the two new mirror positions.
        buf[half] = self.bins[half] * 0.5;
        buf[big - half] = self.bins[half] * 0.5;
        fft_inverse(&mut buf);
        let scale = 1.0 / nfft as f64;
        buf[..self.len * factor].iter().map(|c| c.re * scale).collect()
    }

    /// Hann-shaped band-pass between `lo` and `hi` Hz.
    pub fn band_pass(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.filtered(|f| hann_band(f, lo, hi))
    }

    /// Hilbert envelope of the Hann-shaped band between `lo` and `hi` Hz.
    pub fn band_envelope(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.envelope(|f| hann_band(f, lo, hi))
    }

    /// Low-pass with a raised-cosine roll-off over the top 20 % below `cutoff`.
    pub fn low_pass(&self, cutoff: f64) -> Vec<f64> {
        self.filtered(|f| cosine_low_pass(f, cutoff))
    }
}

pub(crate) fn hann_band(f: f64, lo: f64, hi: f64) -> f64 {
    if f <= lo || f >= hi {
        0.0
    } else {
        0.5 - 0.5 * (2.0 * PI * (f - lo) / (hi - lo)).cos()
    }
}

pub(crate) fn cosine_low_pass(f: f64, cutoff: f64) -> f64 {
    let knee = 0.8 * cutoff;
    if f <= knee {
        1.0
    } else if f >= cutoff {
        0.0
    } else {
        0.5 + 0.5 * (PI * (f - knee) / (cutoff - knee)).cos()
    }
}
