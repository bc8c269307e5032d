//! Recordings, clinical metadata and scalar feature matrices.
//!
//! Recordings are identified by the filename convention
//! `<speaker>_<vowel>_<style>.wav`, optionally overridden by a JSON manifest
//! mapping file names to identities.

mod matrix;
mod metadata;
mod resample;
mod wav;

pub use matrix::{assemble_matrix, AssemblyReport, FeatureMatrix, MatrixProvenance, MIN_PRESENCE};
pub use metadata::{
    load_metadata, parse_metadata, write_metadata, ClinicalRecord, ClinicalScore, Group, Sex,
    METADATA_HEADER,
};
pub use resample::{decimate_by_3, resample_to_16k, TARGET_RATE};
pub use wav::{ingest_recording, load_recording, write_wav, Manifest};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {reason}")]
    Unreadable { path: PathBuf, reason: String },
    #[error("unsupported audio format in {path}: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },
    #[error("cannot determine recording identity from '{name}': {reason}")]
    Identity { name: String, reason: String },
    #[error("invalid recording: {0}")]
    InvalidRecording(String),
    #[error("unsupported sample rate {0} Hz (expected 16000 or 48000)")]
    UnsupportedRate(u32),
    #[error("metadata is missing mandatory column '{0}'")]
    MissingColumn(String),
    #[error("metadata line {line}: column '{column}' has non-numeric value '{value}'")]
    NonNumeric {
        line: usize,
        column: String,
        value: String,
    },
    #[error("duplicate speaker_id '{0}' in metadata")]
    DuplicateSpeaker(String),
    #[error("metadata line {line}: {reason}")]
    InvalidRecord { line: usize, reason: String },
    #[error("feature matrix: {0}")]
    Matrix(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vowel {
    A,
    E,
    I,
    O,
    U,
}

impl Vowel {
    pub const ALL: [Vowel; 5] = [Vowel::A, Vowel::E, Vowel::I, Vowel::O, Vowel::U];

    pub fn as_str(self) -> &'static str {
        match self {
            Vowel::A => "a",
            Vowel::E => "e",
            Vowel::I => "i",
            Vowel::O => "o",
            Vowel::U => "u",
        }
    }
}

impl fmt::Display for Vowel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Vowel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Vowel::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown vowel '{s}'"))
    }
}

/// Elicitation style: short, sustained, sustained loud, sustained soft.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    S,
    L,
    Ll,
    Ls,
}

impl Style {
    pub const ALL: [Style; 4] = [Style::S, Style::L, Style::Ll, Style::Ls];

    pub fn as_str(self) -> &'static str {
        match self {
            Style::S => "s",
            Style::L => "l",
            Style::Ll => "ll",
            Style::Ls => "ls",
        }
    }

    pub fn is_sustained(self) -> bool {
        self != Style::S
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Style {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Style::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown style '{s}'"))
    }
}

/// Speaker, vowel and style of one utterance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RecordingId {
    pub speaker_id: String,
    pub vowel: Vowel,
    pub style: Style,
}

impl RecordingId {
    /// Parse `<speaker>_<vowel>_<style>` (speaker ids may contain underscores).
    pub fn from_stem(stem: &str) -> Result<Self, CorpusError> {
        let err = |reason: &str| CorpusError::Identity {
            name: stem.to_string(),
            reason: reason.to_string(),
        };
        let mut parts = stem.rsplitn(3, '_');
        let style = parts.next().ok_or_else(|| err("missing style"))?;
        let vowel = parts.next().ok_or_else(|| err("missing vowel"))?;
        let speaker = parts.next().ok_or_else(|| err("missing speaker"))?;
        if speaker.is_empty() {
            return Err(err("empty speaker id"));
        }
        Ok(Self {
            speaker_id: speaker.to_string(),
            vowel: vowel.parse().map_err(|e: String| err(&e))?,
            style: style.parse().map_err(|e: String| err(&e))?,
        })
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}_{}", self.speaker_id, self.vowel, self.style)
    }

    /// Feature-name prefix, e.g. `a (ll)`.
    pub fn group_label(&self) -> String {
        group_label(self.vowel, self.style)
    }
}

pub fn group_label(vowel: Vowel, style: Style) -> String {
    format!("{vowel} ({style})")
}

/// One vowel utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub id: RecordingId,
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Recording {
    pub fn new(id: RecordingId, samples: Vec<f64>, sample_rate: u32) -> Result<Self, CorpusError> {
        if samples.is_empty() {
            return Err(CorpusError::InvalidRecording(format!(
                "{}: no samples",
                id.file_stem()
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(CorpusError::InvalidRecording(format!(
                "{}: non-finite sample",
                id.file_stem()
            )));
        }
        if sample_rate == 0 {
            return Err(CorpusError::UnsupportedRate(0));
        }
        Ok(Self {
            id,
            samples,
            sample_rate,
        })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}
