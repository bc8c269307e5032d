use super::CorpusError;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

pub const METADATA_HEADER: [&str; 13] = [
    "speaker_id",
    "group",
    "sex",
    "age",
    "pd_duration",
    "updrs3",
    "updrs4",
    "rbdsq",
    "fog",
    "nmss",
    "bdi",
    "mmse",
    "led",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "PD")]
    Pd,
    #[serde(rename = "HC")]
    Hc,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Pd => "PD",
            Group::Hc => "HC",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sex {
    F,
    M,
}

/// Per-speaker demographics and clinical scales. Scores are absent for
/// healthy controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicalRecord {
    pub speaker_id: String,
    pub group: Group,
    pub sex: Sex,
    pub age: f64,
    pub pd_duration: Option<f64>,
    pub updrs3: Option<f64>,
    pub updrs4: Option<f64>,
    pub rbdsq: Option<f64>,
    pub fog: Option<f64>,
    pub nmss: Option<f64>,
    pub bdi: Option<f64>,
    pub mmse: Option<f64>,
    /// L-dopa equivalent daily dose, mg/day.
    pub led: Option<f64>,
}

impl ClinicalRecord {
    pub fn is_pd(&self) -> bool {
        self.group == Group::Pd
    }

    fn optional_fields(&self) -> [(&'static str, Option<f64>); 9] {
        [
            ("pd_duration", self.pd_duration),
            ("updrs3", self.updrs3),
            ("updrs4", self.updrs4),
            ("rbdsq", self.rbdsq),
            ("fog", self.fog),
            ("nmss", self.nmss),
            ("bdi", self.bdi),
            ("mmse", self.mmse),
            ("led", self.led),
        ]
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.age.is_finite() && self.age >= 0.0) {
            return Err(format!("{}: age must be a nonnegative number", self.speaker_id));
        }
        for (name, value) in self.optional_fields() {
            if let Some(v) = value {
                if self.group == Group::Hc {
                    return Err(format!(
                        "{}: healthy control has clinical score '{name}'",
                        self.speaker_id
                    ));
                }
                if !(v.is_finite() && v >= 0.0) {
                    return Err(format!("{}: '{name}' must be nonnegative", self.speaker_id));
                }
            }
        }
        if let Some(m) = self.mmse {
            if m > 30.0 {
                return Err(format!("{}: mmse {m} exceeds 30", self.speaker_id));
            }
        }
        Ok(())
    }
}

/// The clinical scales that can be correlated with acoustic features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClinicalScore {
    PdDuration,
    Updrs3,
    Updrs4,
    Rbdsq,
    Fog,
    Nmss,
    Bdi,
    Mmse,
}

impl ClinicalScore {
    pub const ALL: [ClinicalScore; 8] = [
        ClinicalScore::PdDuration,
        ClinicalScore::Updrs3,
        ClinicalScore::Updrs4,
        ClinicalScore::Rbdsq,
        ClinicalScore::Fog,
        ClinicalScore::Nmss,
        ClinicalScore::Bdi,
        ClinicalScore::Mmse,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ClinicalScore::PdDuration => "PD duration",
            ClinicalScore::Updrs3 => "UPDRS III",
            ClinicalScore::Updrs4 => "UPDRS IV",
            ClinicalScore::Rbdsq => "RBDSQ",
            ClinicalScore::Fog => "FOG",
            ClinicalScore::Nmss => "NMSS",
            ClinicalScore::Bdi => "BDI",
            ClinicalScore::Mmse => "MMSE",
        }
    }

    /// Metadata column name, e.g. `updrs3`.
    pub fn key(self) -> &'static str {
        match self {
            ClinicalScore::PdDuration => "pd_duration",
            ClinicalScore::Updrs3 => "updrs3",
            ClinicalScore::Updrs4 => "updrs4",
            ClinicalScore::Rbdsq => "rbdsq",
            ClinicalScore::Fog => "fog",
            ClinicalScore::Nmss => "nmss",
            ClinicalScore::Bdi => "bdi",
            ClinicalScore::Mmse => "mmse",
        }
    }

    pub fn value(self, record: &ClinicalRecord) -> Option<f64> {
        match self {
            ClinicalScore::PdDuration => record.pd_duration,
            ClinicalScore::Updrs3 => record.updrs3,
            ClinicalScore::Updrs4 => record.updrs4,
            ClinicalScore::Rbdsq => record.rbdsq,
            ClinicalScore::Fog => record.fog,
            ClinicalScore::Nmss => record.nmss,
            ClinicalScore::Bdi => record.bdi,
            ClinicalScore::Mmse => record.mmse,
        }
    }
}

impl FromStr for ClinicalScore {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ClinicalScore::ALL
            .into_iter()
            .find(|c| c.key() == s)
            .ok_or_else(|| format!("unknown clinical score '{s}'"))
    }
}

pub fn load_metadata(path: &Path) -> Result<Vec<ClinicalRecord>, CorpusError> {
    parse_metadata(std::fs::File::open(path)?)
}

/// Parse the comma-delimited metadata table. Columns are matched by header
/// name; every column of [`METADATA_HEADER`] must be present.
pub fn parse_metadata<R: Read>(reader: R) -> Result<Vec<ClinicalRecord>, CorpusError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers()?.clone();
    let mut index = [0usize; 13];
    for (slot, name) in index.iter_mut().zip(METADATA_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))?;
    }

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (row_idx, row) in csv.records().enumerate() {
        let row = row?;
        let line = row_idx + 2;
        let cell = |i: usize| row.get(index[i]).unwrap_or("");
        let invalid = |reason: String| CorpusError::InvalidRecord { line, reason };
        let number = |i: usize| -> Result<Option<f64>, CorpusError> {
            let raw = cell(i);
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| CorpusError::NonNumeric {
                    line,
                    column: METADATA_HEADER[i].to_string(),
                    value: raw.to_string(),
                })
        };

        let speaker_id = cell(0).to_string();
        if speaker_id.is_empty() {
            return Err(invalid("empty speaker_id".into()));
        }
        let group = match cell(1) {
            "PD" => Group::Pd,
            "HC" => Group::Hc,
            other => return Err(invalid(format!("unknown group '{other}'"))),
        };
        let sex = match cell(2) {
            "F" => Sex::F,
            "M" => Sex::M,
            other => return Err(invalid(format!("unknown sex '{other}'"))),
        };
        let age = number(3)?.ok_or_else(|| invalid(format!("{speaker_id}: age is required")))?;
        let record = ClinicalRecord {
            speaker_id: speaker_id.clone(),
            group,
            sex,
            age,
            pd_duration: number(4)?,
            updrs3: number(5)?,
            updrs4: number(6)?,
            rbdsq: number(7)?,
            fog: number(8)?,
            nmss: number(9)?,
            bdi: number(10)?,
            mmse: number(11)?,
            led: number(12)?,
        };
        record.validate().map_err(invalid)?;
        if !seen.insert(speaker_id.clone()) {
            return Err(CorpusError::DuplicateSpeaker(speaker_id));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_metadata<W: Write>(writer: W, records: &[ClinicalRecord]) -> Result<(), CorpusError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(METADATA_HEADER)?;
    let fmt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    for r in records {
        let sex = match r.sex {
            Sex::F => "F",
            Sex::M => "M",
        };
        let mut row = vec![
            r.speaker_id.clone(),
            r.group.as_str().to_string(),
            sex.to_string(),
            format!("{}", r.age),
        ];
        row.extend(r.optional_fields().iter().map(|(_, v)| fmt(*v)));
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}
