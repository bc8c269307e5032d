use super::{resample_to_16k, CorpusError, Recording, RecordingId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Optional identity override keyed by file name (e.g. `"rec17.wav"`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: BTreeMap<String, RecordingId>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    fn lookup(&self, path: &Path) -> Option<&RecordingId> {
        let name = path.file_name()?.to_str()?;
        self.files.get(name)
    }
}

/// Read a mono 16- or 24-bit PCM WAV file at 16 or 48 kHz.
///
/// Samples are scaled to [-1, 1] by `2^(bits-1)`. The recording keeps its
/// original sample rate; see [`ingest_recording`] for load plus resampling.
pub fn load_recording(path: &Path, manifest: Option<&Manifest>) -> Result<Recording, CorpusError> {
    let id = match manifest.and_then(|m| m.lookup(path)) {
        Some(id) => id.clone(),
        None => {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| CorpusError::Identity {
                    name: path.display().to_string(),
                    reason: "file name is not valid UTF-8".into(),
                })?;
            RecordingId::from_stem(stem)?
        }
    };

    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => CorpusError::Unreadable {
            path: path.to_path_buf(),
            reason: io.to_string(),
        },
        other => CorpusError::UnsupportedFormat {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    })?;
    let spec = reader.spec();
    let unsupported = |reason: String| CorpusError::UnsupportedFormat {
        path: path.to_path_buf(),
        reason,
    };
    if spec.channels != 1 {
        return Err(unsupported(format!("{} channels, expected mono", spec.channels)));
    }
    if spec.sample_format != hound::SampleFormat::Int || !matches!(spec.bits_per_sample, 16 | 24) {
        return Err(unsupported(format!(
            "{:?} {}-bit samples, expected 16- or 24-bit PCM",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    if !matches!(spec.sample_rate, 16_000 | 48_000) {
        return Err(CorpusError::UnsupportedRate(spec.sample_rate));
    }
    let scale = 1.0 / (1u32 << (spec.bits_per_sample - 1)) as f64;
    let samples = reader
        .into_samples::<i32>()
        .map(|s| s.map(|v| v as f64 * scale))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CorpusError::Unreadable {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    Recording::new(id, samples, spec.sample_rate)
}

/// Load then bring to 16 kHz.
pub fn ingest_recording(path: &Path, manifest: Option<&Manifest>) -> Result<Recording, CorpusError> {
    resample_to_16k(load_recording(path, manifest)?)
}

/// Write a recording as mono 16-bit PCM, clipping to full scale.
pub fn write_wav(path: &Path, rec: &Recording) -> Result<(), CorpusError> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: rec.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let io_err = |e: hound::Error| CorpusError::Unreadable {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(io_err)?;
    for &s in &rec.samples {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(io_err)?;
    }
    writer.finalize().map_err(io_err)
}
