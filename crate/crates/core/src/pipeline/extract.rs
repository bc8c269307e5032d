//! Corpus scan, per-recording feature extraction and matrix assembly.

use super::report::{Report, Table};
use super::{load_records, output_error, PipelineConfig, PipelineError};
use crate::conventional::{conventional_features, vowel_space, CornerFormants};
use crate::corpus::{
    assemble_matrix, group_label, ingest_recording, ClinicalRecord, FeatureMatrix, Manifest, MatrixProvenance,
    RecordingId, Style, Vowel,
};
use crate::perceptual::perceptual_features;
use indexmap::IndexMap;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

/// One persisted feature matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKey {
    VowelStyle(Vowel, Style),
    /// Every vowel of one style plus that style's vowel-space measures.
    Style(Style),
    All,
}

impl MatrixKey {
    /// The 20 vowel-style keys, style-major.
    pub fn per_vowel() -> Vec<MatrixKey> {
        Style::ALL
            .into_iter()
            .flat_map(|s| Vowel::ALL.into_iter().map(move |v| MatrixKey::VowelStyle(v, s)))
            .collect()
    }

    /// Every matrix written by [`extract`].
    pub fn every() -> Vec<MatrixKey> {
        let mut keys = Self::per_vowel();
        keys.extend(Style::ALL.into_iter().map(MatrixKey::Style));
        keys.push(MatrixKey::All);
        keys
    }

    /// Row label in reports, e.g. `a (ll)`, `all (s)`, `all (s, l, ll, ls)`.
    pub fn label(self) -> String {
        match self {
            MatrixKey::VowelStyle(v, s) => group_label(v, s),
            MatrixKey::Style(s) => format!("all ({s})"),
            MatrixKey::All => {
                let styles: Vec<&str> = Style::ALL.iter().map(|s| s.as_str()).collect();
                format!("all ({})", styles.join(", "))
            }
        }
    }

    pub fn file_stem(self) -> String {
        match self {
            MatrixKey::VowelStyle(v, s) => format!("{v}_{s}"),
            MatrixKey::Style(s) => format!("all_{s}"),
            MatrixKey::All => "all".to_string(),
        }
    }
}

pub fn matrix_path(cfg: &PipelineConfig, key: MatrixKey) -> PathBuf {
    cfg.matrices_dir().join(format!("{}.csv", key.file_stem()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRecord {
    pub key: MatrixKey,
    pub path: PathBuf,
    pub n_speakers: usize,
    pub n_features: usize,
    pub dropped: usize,
    pub imputed_cells: usize,
    /// Hex SHA-256 of the CSV file.
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractSummary {
    pub recordings: usize,
    pub matrices: Vec<MatrixRecord>,
    /// Recordings or measures that could not be extracted, with the reason.
    pub failures: Vec<String>,
    /// SHA-256 over every matrix digest, in [`MatrixKey::every`] order.
    pub output_hash: String,
    pub report: Report,
}

struct Extracted {
    id: RecordingId,
    features: IndexMap<String, f64>,
    corner: Option<CornerFormants>,
}

fn wav_files(dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| PipelineError::Data(format!("cannot list corpus directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
        .collect();
    files.sort();
    Ok(files)
}

fn extract_one(path: &Path, manifest: Option<&Manifest>, cfg: &PipelineConfig) -> Result<(Extracted, Vec<String>), String> {
    let rec = ingest_recording(path, manifest).map_err(|e| format!("{}: {e}", path.display()))?;
    let prefix = format!("{}: ", rec.id.group_label());
    let mut problems = Vec::new();
    let mut features = IndexMap::new();
    let mut corner = None;
    if cfg.conventional {
        match conventional_features(&rec, &cfg.conventional_analysis, &cfg.functionals) {
            Ok(cf) => {
                features.extend(cf.features.into_iter().map(|(k, v)| (format!("{prefix}{k}"), v)));
                corner = cf.corner;
            }
            Err(e) => problems.push(format!("{}: conventional measures absent: {e}", path.display())),
        }
    }
    let perceptual = perceptual_features(&rec, &cfg.perceptual, &cfg.functionals);
    features.extend(perceptual.into_iter().map(|(k, v)| (format!("{prefix}{k}"), v)));
    Ok((Extracted { id: rec.id, features, corner }, problems))
}

/// Vowel-space measures of one speaker and style, named `aiu (<style>): ...`.
fn vowel_space_features(style: Style, corners: &BTreeMap<Vowel, CornerFormants>) -> IndexMap<String, f64> {
    match (corners.get(&Vowel::A), corners.get(&Vowel::I), corners.get(&Vowel::U)) {
        (Some(&a), Some(&i), Some(&u)) => vowel_space(a, i, u)
            .named()
            .into_iter()
            .map(|(name, v)| (format!("aiu ({style}): {name}"), v))
            .collect(),
        _ => IndexMap::new(),
    }
}

fn sha256_file(path: &Path) -> Result<String, PipelineError> {
    let bytes = std::fs::read(path).map_err(output_error(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Extract every recording in the corpus and write the 20 vowel-style
/// matrices, the 4 per-style matrices and the overall matrix.
///
/// Recordings that fail to load are logged and skipped. Speakers missing
/// from the metadata are skipped; metadata speakers without recordings are
/// left out of the matrices.
pub fn extract(cfg: &PipelineConfig) -> Result<ExtractSummary, PipelineError> {
    cfg.validate()?;
    let records = load_records(cfg)?;
    let manifest = cfg.manifest.as_deref().map(Manifest::load).transpose()?;
    let files = wav_files(&cfg.corpus)?;
    if files.is_empty() {
        return Err(PipelineError::Data(format!("no .wav files in {}", cfg.corpus.display())));
    }
    log::info!("extracting {} recordings", files.len());

    let results: Vec<Result<(Extracted, Vec<String>), String>> =
        files.par_iter().map(|p| extract_one(p, manifest.as_ref(), cfg)).collect();
    let mut failures = Vec::new();
    let mut by_id: HashMap<RecordingId, Extracted> = HashMap::new();
    for r in results {
        match r {
            Ok((ex, problems)) => {
                failures.extend(problems);
                if by_id.contains_key(&ex.id) {
                    return Err(PipelineError::Data(format!("recording {} appears twice in the corpus", ex.id.file_stem())));
                }
                by_id.insert(ex.id.clone(), ex);
            }
            Err(e) => failures.push(e),
        }
    }
    for f in &failures {
        log::warn!("{f}");
    }
    let n_recordings = by_id.len();

    let known: HashMap<&str, &ClinicalRecord> = records.iter().map(|r| (r.speaker_id.as_str(), r)).collect();
    let mut orphans: Vec<&str> = by_id
        .keys()
        .map(|id| id.speaker_id.as_str())
        .filter(|s| !known.contains_key(s))
        .collect();
    orphans.sort_unstable();
    orphans.dedup();
    for s in orphans {
        let msg = format!("speaker '{s}' has recordings but no metadata; skipped");
        log::warn!("{msg}");
        failures.push(msg);
    }
    let cohort: Vec<ClinicalRecord> = records
        .iter()
        .filter(|r| by_id.keys().any(|id| id.speaker_id == r.speaker_id))
        .cloned()
        .collect();
    if cohort.is_empty() {
        return Err(PipelineError::Data("no recording belongs to a speaker in the metadata".into()));
    }

    // Per speaker: vowel-style features, then style and overall merges.
    let mut per_key: HashMap<MatrixKey, HashMap<String, IndexMap<String, f64>>> = HashMap::new();
    for rec in &cohort {
        let speaker = &rec.speaker_id;
        let mut overall = IndexMap::new();
        for style in Style::ALL {
            let mut merged = IndexMap::new();
            let mut corners = BTreeMap::new();
            for vowel in Vowel::ALL {
                let id = RecordingId {
                    speaker_id: speaker.clone(),
                    vowel,
                    style,
                };
                if let Some(ex) = by_id.get(&id) {
                    merged.extend(ex.features.iter().map(|(k, &v)| (k.clone(), v)));
                    if let Some(c) = ex.corner {
                        corners.insert(vowel, c);
                    }
                    per_key
                        .entry(MatrixKey::VowelStyle(vowel, style))
                        .or_default()
                        .insert(speaker.clone(), ex.features.clone());
                }
            }
            if cfg.conventional {
                merged.extend(vowel_space_features(style, &corners));
            }
            overall.extend(merged.iter().map(|(k, &v)| (k.clone(), v)));
            per_key.entry(MatrixKey::Style(style)).or_default().insert(speaker.clone(), merged);
        }
        per_key.entry(MatrixKey::All).or_default().insert(speaker.clone(), overall);
    }

    let dir = cfg.matrices_dir();
    std::fs::create_dir_all(&dir).map_err(output_error(&dir))?;
    let hash = cfg.hash();
    let config_path = cfg.output.join("config.json");
    std::fs::write(&config_path, cfg.to_json()).map_err(output_error(&config_path))?;

    let empty = HashMap::new();
    let mut matrices = Vec::new();
    let mut digest = Sha256::new();
    for key in MatrixKey::every() {
        let (matrix, assembly): (FeatureMatrix, _) = assemble_matrix(per_key.get(&key).unwrap_or(&empty), &cohort);
        if matrix.n_features() == 0 {
            log::warn!("matrix {} has no features", key.label());
        }
        let provenance = MatrixProvenance {
            config_hash: hash.clone(),
            n_speakers: matrix.n_rows(),
            n_features: matrix.n_features(),
            dropped_features: assembly.dropped.clone(),
            imputed_cells: assembly.imputed_cells,
        };
        let path = matrix_path(cfg, key);
        matrix.save(&path, &provenance)?;
        let sha = sha256_file(&path)?;
        digest.update(sha.as_bytes());
        matrices.push(MatrixRecord {
            key,
            path,
            n_speakers: matrix.n_rows(),
            n_features: matrix.n_features(),
            dropped: assembly.dropped.len(),
            imputed_cells: assembly.imputed_cells,
            sha256: sha,
        });
    }
    let output_hash = hex::encode(digest.finalize());

    let mut table = Table::new(["Matrix", "File", "Speakers", "Features", "Dropped", "Imputed", "SHA-256"]);
    for m in &matrices {
        table.push(vec![
            m.key.label(),
            format!("{}.csv", m.key.file_stem()),
            m.n_speakers.to_string(),
            m.n_features.to_string(),
            m.dropped.to_string(),
            m.imputed_cells.to_string(),
            m.sha256.clone(),
        ]);
    }
    let mut report = Report::new("extract", "Feature extraction", &hash)
        .meta("recordings", n_recordings)
        .meta("speakers", cohort.len())
        .meta("output_hash", &output_hash);
    report.table = table;
    if !failures.is_empty() {
        report.sections.push(("Extraction problems".into(), failures.clone()));
    }
    report.write(&cfg.reports_dir())?;

    Ok(ExtractSummary {
        recordings: n_recordings,
        matrices,
        failures,
        output_hash,
        report,
    })
}
