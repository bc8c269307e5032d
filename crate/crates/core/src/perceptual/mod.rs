//! Perceptual feature families: filterbank cepstra, linear-prediction
//! variants, modulation spectra and an inferior-colliculus model, each with
//! optional regression (Δ) coefficients.
//!
//! Every family yields a [`FeatureFrameMatrix`] of frames × coefficients;
//! [`perceptual_features`] reduces them to named scalars.

mod cepstral;
mod delta;
mod filterbank;
mod lp;
mod modulation;

pub use cepstral::{
    cepstra_from_band_energies, cms, filterbank_cepstra, lfcc, mfcc, mfcc_equal_loudness, LOG_FLOOR,
};
pub use delta::delta;
pub use filterbank::{
    bark_to_hz, critical_band_curve, equal_loudness, hz_to_bark, hz_to_mel, mel_to_hz, FilterbankSpec,
    FrequencyScale,
};
pub use lp::{
    acw, acw_cepstrum, frame_models, lpc_features, lpcc, lpct, plp, PlpConfig, PlpWarping,
};
pub use modulation::{icc, msc, IccConfig, MscConfig};

use crate::corpus::Recording;
use crate::dsp::{DspError, FrameSpec};
use crate::functionals::{frame_features, Functional};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerceptualError {
    #[error("invalid filterbank: {0}")]
    InvalidFilterbank(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("recording of {duration:.3} s is shorter than the {needed:.3} s required")]
    TooShort { duration: f64, needed: f64 },
    #[error("{frames} frames available, {needed} required")]
    TooFewFrames { frames: usize, needed: usize },
    #[error("no usable frames")]
    NoFrames,
    #[error(transparent)]
    Dsp(#[from] DspError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    Mfcc,
    Lfcc,
    Cms,
    MfccEql,
    Msc,
    Lpc,
    Plp,
    Lpcc,
    Lpct,
    Acw,
    Icc,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Mfcc,
        Family::Lfcc,
        Family::Cms,
        Family::MfccEql,
        Family::Msc,
        Family::Lpc,
        Family::Plp,
        Family::Lpcc,
        Family::Lpct,
        Family::Acw,
        Family::Icc,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Family::Mfcc => "MFCC",
            Family::Lfcc => "LFCC",
            Family::Cms => "CMS",
            Family::MfccEql => "MFCC_EQL",
            Family::Msc => "MSC",
            Family::Lpc => "LPC",
            Family::Plp => "PLP",
            Family::Lpcc => "LPCC",
            Family::Lpct => "LPCT",
            Family::Acw => "ACW",
            Family::Icc => "ICC",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Frames × coefficients for one family. Coefficient `j` of the matrix is
/// reported as the `(j+1)`-th coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrameMatrix {
    pub family: Family,
    pub delta: bool,
    pub values: Vec<Vec<f64>>,
}

impl FeatureFrameMatrix {
    /// Rejects ragged rows and non-finite values.
    pub fn new(family: Family, delta: bool, values: Vec<Vec<f64>>) -> Result<Self, PerceptualError> {
        if values.is_empty() {
            return Err(PerceptualError::NoFrames);
        }
        let width = values[0].len();
        if values.iter().any(|r| r.len() != width) {
            return Err(PerceptualError::InvalidParameter(format!("{family}: ragged frame matrix")));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(PerceptualError::InvalidParameter(format!("{family}: non-finite coefficient")));
        }
        Ok(Self { family, delta, values })
    }

    pub fn n_frames(&self) -> usize {
        self.values.len()
    }

    pub fn n_coeffs(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    /// Family label used in feature names, e.g. `MFCC` or `ΔMFCC`.
    pub fn name(&self) -> String {
        if self.delta {
            format!("Δ{}", self.family)
        } else {
            self.family.to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerceptualConfig {
    pub frame: FrameSpec,
    pub filterbank: FilterbankSpec,
    pub n_coeffs: usize,
    pub lpc_order: usize,
    pub lpct_order: usize,
    pub plp: PlpConfig,
    pub msc: MscConfig,
    pub icc: IccConfig,
    pub delta_half_width: usize,
    pub families: Vec<Family>,
    pub with_delta: bool,
}

impl Default for PerceptualConfig {
    fn default() -> Self {
        Self {
            frame: FrameSpec::default(),
            filterbank: FilterbankSpec::default(),
            n_coeffs: 20,
            lpc_order: 16,
            lpct_order: 20,
            plp: PlpConfig::default(),
            msc: MscConfig::default(),
            icc: IccConfig::default(),
            delta_half_width: 2,
            families: Family::ALL.to_vec(),
            with_delta: true,
        }
    }
}

/// Frame matrix of one family under `cfg`.
pub fn family_frames(rec: &Recording, family: Family, cfg: &PerceptualConfig) -> Result<FeatureFrameMatrix, PerceptualError> {
    let fb = cfg.filterbank;
    match family {
        Family::Mfcc => mfcc(rec, &cfg.frame, &fb, cfg.n_coeffs),
        Family::Lfcc => lfcc(rec, &cfg.frame, &fb.linear(), cfg.n_coeffs),
        Family::Cms => cms(&mfcc(rec, &cfg.frame, &fb, cfg.n_coeffs)?),
        Family::MfccEql => mfcc_equal_loudness(rec, &cfg.frame, &fb, cfg.n_coeffs),
        Family::Msc => msc(rec, &cfg.msc),
        Family::Lpc => lpc_features(rec, &cfg.frame, cfg.lpc_order),
        Family::Plp => plp(rec, &cfg.frame, &cfg.plp),
        Family::Lpcc => lpcc(rec, &cfg.frame, cfg.lpc_order, cfg.n_coeffs),
        Family::Lpct => lpct(rec, &cfg.frame, cfg.lpct_order, cfg.n_coeffs.min(cfg.lpct_order)),
        Family::Acw => acw(rec, &cfg.frame, cfg.lpc_order, cfg.n_coeffs),
        Family::Icc => icc(rec, &cfg.icc),
    }
}

/// Named scalars for every enabled family and, when enabled, its Δ track.
///
/// A family that cannot be computed for this recording (too short, no
/// usable frames) is left out with a warning.
pub fn perceptual_features(rec: &Recording, cfg: &PerceptualConfig, kinds: &[Functional]) -> IndexMap<String, f64> {
    let mut out = IndexMap::new();
    for &family in &cfg.families {
        let frames = match family_frames(rec, family, cfg) {
            Ok(m) => m,
            Err(e) => {
                log::warn!("{}: {family} absent: {e}", rec.id.file_stem());
                continue;
            }
        };
        out.extend(frame_features(&frames.name(), &frames.values, kinds));
        if cfg.with_delta {
            match delta(&frames, cfg.delta_half_width) {
                Ok(d) => out.extend(frame_features(&d.name(), &d.values, kinds)),
                Err(e) => log::warn!("{}: Δ{family} absent: {e}", rec.id.file_stem()),
            }
        }
    }
    out
}
