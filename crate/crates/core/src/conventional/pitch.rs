//! F0 tracking by normalized cross-correlation and glottal-cycle marking.

use super::ConventionalError;
use crate::dsp::{autocorrelation, levinson_durbin, SignalSpectrum, Window};
use serde::{Deserialize, Serialize};

/// Oversampling factor used for sub-sample lag and peak estimates.
pub(crate) const OVERSAMPLE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchConfig {
    pub f0_min: f64,
    pub f0_max: f64,
    /// Minimum normalized cross-correlation for a frame to count as voiced.
    pub voicing_threshold: f64,
    /// Length of the compared segment, in seconds.
    pub window: f64,
    pub hop: f64,
    /// Frames quieter than this fraction of the loudest frame are unvoiced.
    pub silence_ratio: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            f0_min: 60.0,
            f0_max: 500.0,
            voicing_threshold: 0.45,
            window: 0.03,
            hop: 0.01,
            silence_ratio: 1e-4,
        }
    }
}

/// Per-frame pitch analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    pub sample_rate: f64,
    /// First sample of each analysis frame.
    pub frame_starts: Vec<usize>,
    /// Compared-segment length in samples.
    pub window_len: usize,
    /// Refined lag in samples on voiced frames.
    pub lags: Vec<Option<f64>>,
    /// Peak normalized cross-correlation (refined on voiced frames).
    pub strengths: Vec<f64>,
}

impl PitchTrack {
    pub fn f0_contour(&self) -> Vec<f64> {
        self.lags.iter().flatten().map(|l| self.sample_rate / l).collect()
    }

    pub fn is_voiced(&self, frame: usize) -> bool {
        self.lags[frame].is_some()
    }

    pub fn any_voiced(&self) -> bool {
        self.lags.iter().any(Option::is_some)
    }

    /// Centre of a frame's analysed span, in samples.
    pub fn frame_centre(&self, frame: usize, max_lag: usize) -> f64 {
        self.frame_starts[frame] as f64 + (self.window_len + max_lag) as f64 / 2.0
    }
}

/// Glottal cycles: one period length and one peak amplitude per cycle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeriodSequence {
    /// Seconds.
    pub period_lengths: Vec<f64>,
    pub cycle_peak_amplitudes: Vec<f64>,
}

impl PeriodSequence {
    pub fn len(&self) -> usize {
        self.period_lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.period_lengths.is_empty()
    }
}

/// Signal plus its band-limited oversampled copy, with energy prefix sums.
pub(crate) struct Analysis<'a> {
    pub x: &'a [f64],
    pub fine: Vec<f64>,
    pub fs: f64,
}

impl<'a> Analysis<'a> {
    pub fn new(x: &'a [f64], fs: f64) -> Self {
        let fine = SignalSpectrum::new(x, fs).upsampled(OVERSAMPLE);
        Self { x, fine, fs }
    }

    /// Normalized correlation between `x[start..start+len]` and the same
    /// segment delayed by `lag_fine / OVERSAMPLE` samples.
    pub fn nccf_fine(&self, start: usize, len: usize, lag_fine: usize) -> Option<f64> {
        let last = OVERSAMPLE * (start + len - 1) + lag_fine;
        if last >= self.fine.len() {
            return None;
        }
        let a = &self.x[start..start + len];
        let mut cross = 0.0;
        let mut e_b = 0.0;
        for (i, &av) in a.iter().enumerate() {
            let b = self.fine[OVERSAMPLE * (start + i) + lag_fine];
            cross += av * b;
            e_b += b * b;
        }
        let e_a: f64 = a.iter().map(|v| v * v).sum();
        let denom = (e_a * e_b).sqrt();
        Some(if denom > 0.0 { cross / denom } else { 0.0 })
    }

    /// Best lag (fine resolution, parabolic refinement) within
    /// `coarse ± 1` sample, returned in samples with its correlation.
    pub fn refine_lag(&self, start: usize, len: usize, coarse: usize) -> Option<(f64, f64)> {
        let lo = OVERSAMPLE * coarse.saturating_sub(1);
        let hi = OVERSAMPLE * (coarse + 1);
        let values: Vec<(usize, f64)> = (lo..=hi)
            .filter_map(|l| self.nccf_fine(start, len, l).map(|c| (l, c)))
            .collect();
        let best = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?
            .0;
        let (l, c) = values[best];
        if best == 0 || best + 1 == values.len() {
            return Some((l as f64 / OVERSAMPLE as f64, c));
        }
        let (ym, yp) = (values[best - 1].1, values[best + 1].1);
        let (delta, peak) = parabolic_peak(ym, c, yp);
        Some(((l as f64 + delta) / OVERSAMPLE as f64, peak))
    }
}

/// Vertex of the parabola through `(-1, ym), (0, y0), (1, yp)`.
pub(crate) fn parabolic_peak(ym: f64, y0: f64, yp: f64) -> (f64, f64) {
    let denom = ym - 2.0 * y0 + yp;
    if denom >= 0.0 {
        return (0.0, y0);
    }
    let delta = (0.5 * (ym - yp) / denom).clamp(-0.5, 0.5);
    (delta, y0 - 0.25 * (ym - yp) * delta)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Frame-wise pitch analysis. Frames with too little energy or whose best
/// normalized cross-correlation stays below the voicing threshold are
/// unvoiced.
pub(crate) fn track_pitch(an: &Analysis<'_>, cfg: &PitchConfig) -> Result<PitchTrack, ConventionalError> {
    let x = an.x;
    let fs = an.fs;
    let min_lag = (fs / cfg.f0_max).floor().max(2.0) as usize;
    let max_lag = (fs / cfg.f0_min).ceil() as usize;
    let window_len = (cfg.window * fs).round() as usize;
    let hop = ((cfg.hop * fs).round() as usize).max(1);
    let span = window_len + max_lag + 2;
    if x.len() < span {
        return Err(ConventionalError::TooShort {
            samples: x.len(),
            needed: span,
        });
    }

    let mut sq_prefix = Vec::with_capacity(x.len() + 1);
    sq_prefix.push(0.0);
    for v in x {
        sq_prefix.push(sq_prefix.last().unwrap() + v * v);
    }
    let seg_energy = |s: usize| sq_prefix[s + window_len] - sq_prefix[s];

    let frame_starts: Vec<usize> = (0..=(x.len() - span) / hop).map(|i| i * hop).collect();
    let loudest = frame_starts.iter().map(|&s| seg_energy(s)).fold(0.0, f64::max);

    let mut lags = Vec::with_capacity(frame_starts.len());
    let mut strengths = Vec::with_capacity(frame_starts.len());
    let mut nccf = vec![0.0; max_lag + 2];
    for &s in &frame_starts {
        let e0 = seg_energy(s);
        if !(e0 > cfg.silence_ratio * loudest) || e0 <= 0.0 {
            lags.push(None);
            strengths.push(0.0);
            continue;
        }
        let a = &x[s..s + window_len];
        for (lag, slot) in nccf.iter_mut().enumerate().take(max_lag + 2).skip(min_lag - 1) {
            let b = &x[s + lag..s + lag + window_len];
            let el = seg_energy(s + lag);
            *slot = if el > 0.0 { dot(a, b) / (e0 * el).sqrt() } else { 0.0 };
        }
        let global = (min_lag..=max_lag).map(|l| nccf[l]).fold(f64::MIN, f64::max);
        // Smallest-lag local maximum close to the global one avoids
        // picking a period multiple.
        let chosen = (min_lag..=max_lag).find(|&l| {
            nccf[l] >= 0.9 * global && nccf[l] >= nccf[l - 1] && nccf[l] >= nccf[l + 1]
        });
        match chosen {
            Some(l) if global >= cfg.voicing_threshold => match an.refine_lag(s, window_len, l) {
                Some((lag, strength)) if strength >= cfg.voicing_threshold => {
                    lags.push(Some(lag));
                    strengths.push(strength.min(1.0));
                }
                _ => {
                    lags.push(None);
                    strengths.push(global);
                }
            },
            _ => {
                lags.push(None);
                strengths.push(global.max(0.0));
            }
        }
    }
    fix_octave_jumps(an, &frame_starts, window_len, (min_lag, max_lag), cfg, &mut lags, &mut strengths);
    Ok(PitchTrack {
        sample_rate: fs,
        frame_starts,
        window_len,
        lags,
        strengths,
    })
}

/// Frames whose lag sits near a multiple or fraction of the median of the surrounding
/// voiced frames are re-picked at the NCCF maximum near that median.
fn fix_octave_jumps(
    an: &Analysis<'_>,
    frame_starts: &[usize],
    window_len: usize,
    (min_lag, max_lag): (usize, usize),
    cfg: &PitchConfig,
    lags: &mut [Option<f64>],
    strengths: &mut [f64],
) {
    const REACH: usize = 10;
    let original = lags.to_vec();
    for f in 0..original.len() {
        let Some(lag) = original[f] else { continue };
        let mut near: Vec<f64> = original[f.saturating_sub(REACH)..(f + REACH + 1).min(original.len())]
            .iter()
            .flatten()
            .copied()
            .collect();
        if near.len() < 3 {
            continue;
        }
        near.sort_by(f64::total_cmp);
        let median = near[near.len() / 2];
        let ratio = lag / median;
        if (0.8..1.25).contains(&ratio) || !(0.2..4.5).contains(&ratio) {
            continue;
        }
        let s = frame_starts[f];
        let a = &an.x[s..s + window_len];
        let e_a: f64 = a.iter().map(|v| v * v).sum();
        let lo = ((0.85 * median).floor() as usize).max(min_lag);
        let hi = ((1.15 * median).ceil() as usize).min(max_lag);
        let best = (lo..=hi)
            .map(|l| {
                let b = &an.x[s + l..s + l + window_len];
                let e_b: f64 = b.iter().map(|v| v * v).sum();
                let c = if e_a > 0.0 && e_b > 0.0 { dot(a, b) / (e_a * e_b).sqrt() } else { 0.0 };
                (l, c)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((l, _)) = best {
            if let Some((refined, strength)) = an.refine_lag(s, window_len, l) {
                if strength >= cfg.voicing_threshold {
                    lags[f] = Some(refined);
                    strengths[f] = strength.min(1.0);
                }
            }
        }
    }
}

/// Follow glottal cycles through voiced stretches.
///
/// Cycles are matched on the low-passed LPC residual, where formant ringing
/// from the previous cycle no longer shifts the match. Tracking starts at the
/// largest residual peak in the first period of each voiced run; each next
/// cycle boundary is the lag in `[0.8 T, 1.25 T]` maximizing the normalized
/// cross-correlation of a window covering most of one cycle, with `T` the
/// local pitch period. Cycle amplitude is the largest oversampled waveform
/// magnitude within half a period of the cycle anchor. Runs are
/// concatenated into one sequence.
pub(crate) fn track_cycles(an: &Analysis<'_>, track: &PitchTrack, cfg: &PitchConfig) -> PeriodSequence {
    let fs = an.fs;
    let max_lag = (fs / cfg.f0_min).ceil() as usize;
    let n_frames = track.lags.len();
    let frame_span = track.window_len + max_lag;
    let hop = if n_frames > 1 {
        track.frame_starts[1] - track.frame_starts[0]
    } else {
        1
    };
    let centre0 = track.frame_centre(0, max_lag);
    let residual = SignalSpectrum::new(&lpc_residual(an.x, fs), fs).low_pass(RESIDUAL_CUTOFF);
    let res = Analysis::new(&residual, fs);
    let mut out = PeriodSequence::default();
    let mut frame = 0;
    while frame < n_frames {
        if !track.is_voiced(frame) {
            frame += 1;
            continue;
        }
        let run_start = frame;
        while frame < n_frames && track.is_voiced(frame) {
            frame += 1;
        }
        let run_end = frame - 1;
        // Nearest frame of this run, so edges never land on unvoiced frames.
        let local_period = |pos: f64| -> Option<f64> {
            let idx = ((pos - centre0) / hop as f64).round().clamp(run_start as f64, run_end as f64) as usize;
            track.lags[idx]
        };
        let lo = track.frame_starts[run_start];
        let hi = (track.frame_starts[run_end] + frame_span).min(an.x.len());
        track_run(an, &res, lo, hi, &local_period, cfg, &mut out);
    }
    out
}

fn track_run(
    an: &Analysis<'_>,
    res: &Analysis<'_>,
    lo: usize,
    hi: usize,
    local_period: &dyn Fn(f64) -> Option<f64>,
    cfg: &PitchConfig,
    out: &mut PeriodSequence,
) {
    let fs = an.fs;
    let x = res.x;
    let min_period = fs / cfg.f0_max;
    let max_period = fs / cfg.f0_min;
    let peak_in = |a: usize, b: usize| -> Option<usize> {
        (a..b.min(hi)).max_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs()))
    };

    let Some(t0) = local_period(lo as f64) else {
        return;
    };
    let first = (lo as f64 + t0 / 2.0).ceil() as usize;
    let Some(mut anchor) = peak_in(first, first + t0.ceil() as usize) else {
        return;
    };
    let mut pos = anchor as f64;

    loop {
        let Some(t) = local_period(pos) else {
            break;
        };
        let half = (t / 2.0).round() as usize;
        // One cycle from just before its peak; a window straddling two cycles
        // would average neighbouring periods.
        let lead = (0.1 * t).round() as usize;
        let win = ((0.8 * t).round() as usize).max(4);
        let start = anchor.saturating_sub(lead);
        let lag_lo = (0.8 * t).floor() as usize;
        let lag_hi = (1.25 * t).ceil() as usize;
        if start < lo || start + win + lag_hi + 1 >= hi {
            break;
        }
        let a = &x[start..start + win];
        let e_a: f64 = a.iter().map(|v| v * v).sum();
        let mut best = (0usize, f64::MIN);
        for lag in lag_lo..=lag_hi {
            let b = &x[start + lag..start + lag + win];
            let e_b: f64 = b.iter().map(|v| v * v).sum();
            let c = if e_a > 0.0 && e_b > 0.0 {
                dot(a, b) / (e_a * e_b).sqrt()
            } else {
                0.0
            };
            if c > best.1 {
                best = (lag, c);
            }
        }
        let refined = if best.1 >= cfg.voicing_threshold {
            res.refine_lag(start, win, best.0)
        } else {
            None
        };
        match refined {
            Some((period, _)) if period >= min_period && period <= max_period => {
                let amp = fine_peak(an, pos, period);
                out.period_lengths.push(period / fs);
                out.cycle_peak_amplitudes.push(amp);
                pos += period;
            }
            _ => {
                // Lost lock: re-anchor one period later.
                pos += t;
                let p = pos.round() as usize;
                match peak_in(p.saturating_sub(half), p + half) {
                    Some(p) => pos = p as f64,
                    None => break,
                }
            }
        }
        anchor = pos.round() as usize;
    }
}

const RESIDUAL_FRAME: f64 = 0.025;
/// Low-pass on the residual used for cycle matching, Hz.
const RESIDUAL_CUTOFF: f64 = 3000.0;
const RESIDUAL_HOP: f64 = 0.01;

/// Short-time LPC inverse filtering. Each hop is filtered with the model
/// fitted on the Hann-windowed frame centred on it.
fn lpc_residual(x: &[f64], fs: f64) -> Vec<f64> {
    let order = (fs / 1000.0) as usize + 2;
    let frame = (RESIDUAL_FRAME * fs).round() as usize;
    let hop = ((RESIDUAL_HOP * fs).round() as usize).max(1);
    let window = Window::Hann.coefficients(frame);
    let mut out = vec![0.0; x.len()];
    let mut start = 0;
    while start < x.len() {
        let end = (start + hop).min(x.len());
        let centre = (start + end) / 2;
        let from = centre.saturating_sub(frame / 2).min(x.len().saturating_sub(frame));
        let seg: Vec<f64> = x[from..(from + frame).min(x.len())].iter().zip(&window).map(|(v, w)| v * w).collect();
        let model = levinson_durbin(&autocorrelation(&seg, order), order).ok();
        for n in start..end {
            let mut e = x[n];
            if let Some(m) = &model {
                for (k, &a) in m.coefficients.iter().enumerate() {
                    if n > k {
                        e += a * x[n - k - 1];
                    }
                }
            }
            out[n] = e;
        }
        start = end;
    }
    out
}

/// Largest oversampled magnitude within half a period around `pos`,
/// refined by a parabola through the neighbouring oversampled values.
fn fine_peak(an: &Analysis<'_>, pos: f64, period: f64) -> f64 {
    let os = OVERSAMPLE as f64;
    let lo = ((pos - period / 2.0) * os).max(1.0) as usize;
    let hi = (((pos + period / 2.0) * os) as usize).min(an.fine.len() - 1);
    let Some(i) = (lo..hi).max_by(|&i, &j| an.fine[i].abs().total_cmp(&an.fine[j].abs())) else {
        return 0.0;
    };
    let (ym, y0, yp) = (an.fine[i - 1].abs(), an.fine[i].abs(), an.fine[i + 1].abs());
    parabolic_peak(ym, y0, yp).1
}
