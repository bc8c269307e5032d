//! End-to-end orchestration: extraction to feature matrices, then screening,
//! selection, classification and clinical correlation reports.
//!
//! Every stage reads the [`PipelineConfig`] and works inside its output
//! directory. Extraction writes `matrices/`; the later stages read those
//! matrices and write aligned text and tab-separated reports to `reports/`.

mod extract;
mod report;
mod stages;

pub use extract::{extract, matrix_path, ExtractSummary, MatrixKey, MatrixRecord};
pub use report::{Report, Table};
pub use stages::{
    classify, correlate, majority_features, screen, select, summarize, ClassificationRow, CorrelationOutcome,
    ScreenOutcome, SelectionRow, REPORT_ORDER,
};

use crate::conventional::ConventionalConfig;
use crate::corpus::{load_metadata, ClinicalRecord, CorpusError, FeatureMatrix};
use crate::functionals::Functional;
use crate::model::{ForestConfig, ModelError};
use crate::perceptual::PerceptualConfig;
use crate::screening::{ScreeningConfig, ScreeningError};
use crate::selection::{Placement, SelectionConfig, SelectionError, MAX_SUBSET_SIZE};
use crate::synth::SynthError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("feature matrix {0} is missing; run extract first")]
    MissingMatrix(PathBuf),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Screening(#[from] ScreeningError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

/// Coarse cause of a failure, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureClass {
    Config,
    Data,
    Internal,
}

impl FailureClass {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureClass::Config => 2,
            FailureClass::Data => 3,
            FailureClass::Internal => 4,
        }
    }
}

impl PipelineError {
    pub fn class(&self) -> FailureClass {
        match self {
            PipelineError::Config(_) => FailureClass::Config,
            PipelineError::Selection(SelectionError::InvalidConfig(_)) => FailureClass::Config,
            PipelineError::Model(ModelError::InvalidConfig(_)) => FailureClass::Config,
            PipelineError::Synth(SynthError::InvalidParameter(_)) => FailureClass::Config,
            PipelineError::Output { .. } => FailureClass::Internal,
            PipelineError::Synth(SynthError::Corpus(_)) => FailureClass::Internal,
            _ => FailureClass::Data,
        }
    }
}

pub(crate) fn output_error(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Output {
        path: path.to_path_buf(),
        source,
    }
}

/// Which matrices the selection and classification stages run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// One row per vowel and style.
    PerVowel,
    /// One row per style, all vowels of that style merged.
    PerStyle,
    /// One row over every recording of a speaker.
    #[default]
    All,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::PerVowel, Scenario::PerStyle, Scenario::All];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::PerVowel => "per-vowel",
            Scenario::PerStyle => "per-style",
            Scenario::All => "all",
        }
    }

    /// Matrices evaluated by this scenario, in report order.
    pub fn matrices(self) -> Vec<MatrixKey> {
        match self {
            Scenario::PerVowel => MatrixKey::per_vowel(),
            Scenario::PerStyle => crate::corpus::Style::ALL.into_iter().map(MatrixKey::Style).collect(),
            Scenario::All => vec![MatrixKey::All],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown scenario '{s}' (expected per-vowel, per-style or all)"))
    }
}

/// Full description of a run. The top-level `seed` overrides the seeds of
/// every forest below it (see [`PipelineConfig::apply_seed`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Directory of `<speaker>_<vowel>_<style>.wav` files.
    pub corpus: PathBuf,
    pub metadata: PathBuf,
    /// Optional JSON manifest mapping file names to recording identities.
    pub manifest: Option<PathBuf>,
    /// Working directory for matrices and reports.
    pub output: PathBuf,
    pub seed: u64,
    /// Include F0, jitter, shimmer, TKEO, HNR, GNE, formants and vowel space.
    pub conventional: bool,
    pub conventional_analysis: ConventionalConfig,
    /// Families, frame geometry and Δ switch of the perceptual features.
    pub perceptual: PerceptualConfig,
    pub functionals: Vec<Functional>,
    pub screening: ScreeningConfig,
    pub selection: SelectionConfig,
    /// Classifier evaluated by leave-one-out.
    pub forest: ForestConfig,
    pub scenario: Scenario,
    pub placement: Placement,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: PathBuf::new(),
            metadata: PathBuf::new(),
            manifest: None,
            output: PathBuf::new(),
            seed: 0,
            conventional: true,
            conventional_analysis: ConventionalConfig::default(),
            perceptual: PerceptualConfig::default(),
            functionals: Functional::ALL.to_vec(),
            screening: ScreeningConfig::default(),
            selection: SelectionConfig::default(),
            forest: ForestConfig::default(),
            scenario: Scenario::All,
            placement: Placement::Paper,
        }
    }
}

impl PipelineConfig {
    /// Set `seed` and copy it into every forest.
    pub fn apply_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.forest.seed = seed;
        self.selection.wrapper_forest.seed = seed;
        self.screening.forest.seed = seed;
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.corpus.as_os_str().is_empty() {
            return bad("'corpus' is required");
        }
        if self.metadata.as_os_str().is_empty() {
            return bad("'metadata' is required");
        }
        if self.output.as_os_str().is_empty() {
            return bad("'output' is required");
        }
        if !self.conventional && self.perceptual.families.is_empty() {
            return bad("no feature family is enabled");
        }
        if self.functionals.is_empty() {
            return bad("'functionals' must not be empty");
        }
        if self.selection.k == 0 {
            return bad("selection.k must be positive");
        }
        if self.selection.max_size == 0 || self.selection.max_size > MAX_SUBSET_SIZE {
            return bad(&format!("selection.max_size must be in 1..={MAX_SUBSET_SIZE}"));
        }
        for (name, f) in [
            ("forest", &self.forest),
            ("selection.wrapper_forest", &self.selection.wrapper_forest),
            ("screening.forest", &self.screening.forest),
        ] {
            if f.n_trees == 0 {
                return bad(&format!("{name}.n_trees must be positive"));
            }
            if f.min_leaf == 0 {
                return bad(&format!("{name}.min_leaf must be positive"));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form. The output directory is left
    /// out, so the same analysis written elsewhere keeps its hash.
    pub fn hash(&self) -> String {
        let hashed = PipelineConfig {
            output: PathBuf::new(),
            ..self.clone()
        };
        let json = serde_json::to_vec(&hashed).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn matrices_dir(&self) -> PathBuf {
        self.output.join("matrices")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.output.join("reports")
    }
}

/// Metadata records plus PD labels aligned to a matrix's rows.
pub(crate) fn labels_for(matrix: &FeatureMatrix, records: &[ClinicalRecord]) -> Result<Vec<bool>, PipelineError> {
    matrix
        .speaker_ids
        .iter()
        .map(|id| {
            records
                .iter()
                .find(|r| &r.speaker_id == id)
                .map(ClinicalRecord::is_pd)
                .ok_or_else(|| PipelineError::Data(format!("speaker '{id}' is missing from the metadata")))
        })
        .collect()
}

pub(crate) fn load_records(cfg: &PipelineConfig) -> Result<Vec<ClinicalRecord>, PipelineError> {
    Ok(load_metadata(&cfg.metadata)?)
}

pub(crate) fn load_matrix(cfg: &PipelineConfig, key: MatrixKey) -> Result<FeatureMatrix, PipelineError> {
    let path = matrix_path(cfg, key);
    if !path.exists() {
        return Err(PipelineError::MissingMatrix(path));
    }
    Ok(FeatureMatrix::load(&path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn valid() -> PipelineConfig {
        PipelineConfig {
            corpus: "c".into(),
            metadata: "m.csv".into(),
            output: "out".into(),
            ..Default::default()
        }
    }

    #[test]
    fn seed_reaches_every_forest() {
        let mut c = valid();
        c.apply_seed(99);
        assert_eq!(c.forest.seed, 99);
        assert_eq!(c.selection.wrapper_forest.seed, 99);
        assert_eq!(c.screening.forest.seed, 99);
    }

    #[test]
    fn hash_tracks_content() {
        let a = valid();
        let mut b = valid();
        assert_eq!(a.hash(), b.hash());
        b.output = "elsewhere".into();
        assert_eq!(a.hash(), b.hash());
        b.selection.k = 100;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn validation() {
        assert!(valid().validate().is_ok());
        let mut c = valid();
        c.corpus = PathBuf::new();
        assert!(matches!(c.validate(), Err(PipelineError::Config(_))));
        let mut c = valid();
        c.selection.max_size = 31;
        assert_eq!(c.validate().unwrap_err().class(), FailureClass::Config);
        let mut c = valid();
        c.conventional = false;
        c.perceptual.families.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = valid();
        let back: PipelineConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn scenario_names() {
        for s in Scenario::ALL {
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
        assert_eq!(Scenario::PerVowel.matrices().len(), 20);
        assert_eq!(Scenario::PerStyle.matrices().len(), 4);
        assert!("vowels".parse::<Scenario>().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(PipelineError::Config("x".into()).class().exit_code(), 2);
        assert_eq!(PipelineError::Data("x".into()).class().exit_code(), 3);
        let out = PipelineError::Output {
            path: "x".into(),
            source: std::io::Error::other("x"),
        };
        assert_eq!(out.class().exit_code(), 4);
    }
}
