use super::{ClinicalRecord, CorpusError};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

/// Fraction of speakers that must carry a feature for it to be kept.
pub const MIN_PRESENCE: f64 = 0.8;

/// Subjects × named scalar features.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    pub feature_names: Vec<String>,
    pub speaker_ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Sidecar written next to every persisted matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixProvenance {
    pub config_hash: String,
    pub n_speakers: usize,
    pub n_features: usize,
    #[serde(default)]
    pub dropped_features: Vec<String>,
    #[serde(default)]
    pub imputed_cells: usize,
}

impl FeatureMatrix {
    pub fn new(
        feature_names: Vec<String>,
        speaker_ids: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, CorpusError> {
        let m = Self {
            feature_names,
            speaker_ids,
            rows,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.rows.len() != self.speaker_ids.len() {
            return Err(CorpusError::Matrix(format!(
                "{} rows but {} speaker ids",
                self.rows.len(),
                self.speaker_ids.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &self.feature_names {
            if !seen.insert(name.as_str()) {
                return Err(CorpusError::Matrix(format!("duplicate feature name '{name}'")));
            }
        }
        for (row, id) in self.rows.iter().zip(&self.speaker_ids) {
            if row.len() != self.feature_names.len() {
                return Err(CorpusError::Matrix(format!(
                    "row '{id}' has {} values, expected {}",
                    row.len(),
                    self.feature_names.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(CorpusError::Matrix(format!("row '{id}' has a non-finite value")));
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n_features()).map(|j| self.column(j)).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Keep only the given columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: idx.iter().map(|&j| self.feature_names[j].clone()).collect(),
            speaker_ids: self.speaker_ids.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect(),
        }
    }

    /// Keep only the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            speaker_ids: idx.iter().map(|&i| self.speaker_ids[i].clone()).collect(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Columns whose name starts with `prefix`.
    pub fn with_prefix(&self, prefix: &str) -> FeatureMatrix {
        let idx: Vec<usize> = (0..self.n_features())
            .filter(|&j| self.feature_names[j].starts_with(prefix))
            .collect();
        self.select_columns(&idx)
    }

    /// Horizontal concatenation of matrices sharing the same speaker order.
    pub fn hstack(parts: &[FeatureMatrix]) -> Result<FeatureMatrix, CorpusError> {
        let Some(first) = parts.first() else {
            return Ok(FeatureMatrix::default());
        };
        let mut out = FeatureMatrix {
            feature_names: Vec::new(),
            speaker_ids: first.speaker_ids.clone(),
            rows: vec![Vec::new(); first.n_rows()],
        };
        for p in parts {
            if p.speaker_ids != first.speaker_ids {
                return Err(CorpusError::Matrix("hstack: speaker order differs".into()));
            }
            out.feature_names.extend(p.feature_names.iter().cloned());
            for (dst, src) in out.rows.iter_mut().zip(&p.rows) {
                dst.extend_from_slice(src);
            }
        }
        out.validate()?;
        Ok(out)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<(), CorpusError> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header = vec!["speaker_id".to_string()];
        header.extend(self.feature_names.iter().cloned());
        csv.write_record(&header)?;
        for (id, row) in self.speaker_ids.iter().zip(&self.rows) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| format!("{v:.16e}")));
            csv.write_record(&rec)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<FeatureMatrix, CorpusError> {
        let mut csv = csv::Reader::from_reader(reader);
        let headers = csv.headers()?.clone();
        if headers.get(0) != Some("speaker_id") {
            return Err(CorpusError::MissingColumn("speaker_id".into()));
        }
        let feature_names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut speaker_ids = Vec::new();
        let mut rows = Vec::new();
        for (i, rec) in csv.records().enumerate() {
            let rec = rec?;
            speaker_ids.push(rec.get(0).unwrap_or("").to_string());
            let row = rec
                .iter()
                .skip(1)
                .enumerate()
                .map(|(j, cell)| {
                    cell.parse::<f64>().map_err(|_| CorpusError::NonNumeric {
                        line: i + 2,
                        column: feature_names.get(j).cloned().unwrap_or_default(),
                        value: cell.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        FeatureMatrix::new(feature_names, speaker_ids, rows)
    }

    /// Path of the JSON sidecar for a matrix file.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        path.with_extension("json")
    }

    pub fn save(&self, path: &Path, provenance: &MatrixProvenance) -> Result<(), CorpusError> {
        self.write_csv(std::fs::File::create(path)?)?;
        let json = serde_json::to_string_pretty(provenance)?;
        std::fs::write(Self::sidecar_path(path), json + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<FeatureMatrix, CorpusError> {
        let file = std::fs::File::open(path).map_err(|e| CorpusError::Unreadable {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::read_csv(file)
    }

    pub fn load_provenance(path: &Path) -> Result<MatrixProvenance, CorpusError> {
        let text = std::fs::read_to_string(Self::sidecar_path(path))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Result of [`assemble_matrix`] bookkeeping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssemblyReport {
    pub dropped: Vec<String>,
    pub imputed_cells: usize,
}

/// Stack per-speaker named scalars into a matrix with one row per cohort member.
///
/// Column order is first appearance when walking the cohort in order. Features
/// present (and finite) for fewer than [`MIN_PRESENCE`] of the speakers are
/// dropped with a warning; remaining gaps take the feature's cohort median.
pub fn assemble_matrix(
    per_speaker: &HashMap<String, IndexMap<String, f64>>,
    cohort: &[ClinicalRecord],
) -> (FeatureMatrix, AssemblyReport) {
    let mut names: IndexMap<&str, ()> = IndexMap::new();
    for rec in cohort {
        if let Some(feats) = per_speaker.get(&rec.speaker_id) {
            for name in feats.keys() {
                names.entry(name.as_str()).or_insert(());
            }
        }
    }

    let n = cohort.len();
    let mut report = AssemblyReport::default();
    let mut kept = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &name in names.keys() {
        let raw: Vec<Option<f64>> = cohort
            .iter()
            .map(|rec| {
                per_speaker
                    .get(&rec.speaker_id)
                    .and_then(|f| f.get(name))
                    .copied()
                    .filter(|v| v.is_finite())
            })
            .collect();
        let present: Vec<f64> = raw.iter().flatten().copied().collect();
        if n == 0 || (present.len() as f64) < MIN_PRESENCE * n as f64 {
            log::warn!(
                "dropping feature '{name}': present for {}/{} speakers",
                present.len(),
                n
            );
            report.dropped.push(name.to_string());
            continue;
        }
        let fill = median(&present);
        report.imputed_cells += raw.iter().filter(|v| v.is_none()).count();
        kept.push(name.to_string());
        columns.push(raw.into_iter().map(|v| v.unwrap_or(fill)).collect());
    }

    let rows = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let matrix = FeatureMatrix {
        feature_names: kept,
        speaker_ids: cohort.iter().map(|r| r.speaker_id.clone()).collect(),
        rows,
    };
    (matrix, report)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
