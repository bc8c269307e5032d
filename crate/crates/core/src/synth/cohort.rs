//! Synthetic PD/HC cohorts: 20 vowel recordings per speaker plus clinical
//! metadata, all driven by one severity value per speaker.

use super::{synthesize_vowel, SynthError, SynthesisParams};
use crate::corpus::{write_metadata, write_wav, ClinicalRecord, Group, Recording, RecordingId, Sex, Style, Vowel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

pub const MIN_GROUP_SIZE: usize = 5;

/// Voice parameters of a group. For PD speakers these are the values at
/// severity 1; lower severities interpolate towards the HC profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupProfile {
    pub jitter_pct: f64,
    pub shimmer_pct: f64,
    pub hnr_db: f64,
    /// Fraction of the way each formant moves towards the neutral vowel.
    pub formant_centralization: f64,
    /// Loud minus soft sustained level, dB.
    pub loudness_range_db: f64,
}

impl Default for GroupProfile {
    fn default() -> Self {
        Self::healthy()
    }
}

impl GroupProfile {
    pub fn healthy() -> Self {
        Self {
            jitter_pct: 0.4,
            shimmer_pct: 2.0,
            hnr_db: 24.0,
            formant_centralization: 0.0,
            loudness_range_db: 12.0,
        }
    }

    pub fn parkinsonian() -> Self {
        Self {
            jitter_pct: 2.2,
            shimmer_pct: 6.0,
            hnr_db: 12.0,
            formant_centralization: 0.3,
            loudness_range_db: 4.0,
        }
    }

    fn lerp(&self, other: &GroupProfile, t: f64) -> GroupProfile {
        let mix = |a: f64, b: f64| a + t * (b - a);
        GroupProfile {
            jitter_pct: mix(self.jitter_pct, other.jitter_pct),
            shimmer_pct: mix(self.shimmer_pct, other.shimmer_pct),
            hnr_db: mix(self.hnr_db, other.hnr_db),
            formant_centralization: mix(self.formant_centralization, other.formant_centralization),
            loudness_range_db: mix(self.loudness_range_db, other.loudness_range_db),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CohortProfile {
    pub hc: GroupProfile,
    pub pd: GroupProfile,
    /// PD severities are uniform on this interval.
    pub severity_range: (f64, f64),
    /// Between-speaker spread of jitter and shimmer, as a log-normal sigma.
    pub speaker_spread: f64,
    /// Between-speaker spread of HNR, dB.
    pub hnr_spread_db: f64,
    /// Seconds, for the short style and for the three sustained styles.
    pub short_duration: f64,
    pub sustained_duration: f64,
}

impl Default for CohortProfile {
    fn default() -> Self {
        Self {
            hc: GroupProfile::healthy(),
            pd: GroupProfile::parkinsonian(),
            severity_range: (0.35, 1.0),
            speaker_spread: 0.2,
            hnr_spread_db: 1.5,
            short_duration: 0.6,
            sustained_duration: 1.5,
        }
    }
}

impl CohortProfile {
    fn validate(&self) -> Result<(), SynthError> {
        let (lo, hi) = self.severity_range;
        if !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
            return Err(SynthError::InvalidParameter("severity_range must satisfy 0 <= lo <= hi <= 1".into()));
        }
        if !(self.speaker_spread >= 0.0 && self.hnr_spread_db >= 0.0) {
            return Err(SynthError::InvalidParameter("spreads must be nonnegative".into()));
        }
        for g in [&self.hc, &self.pd] {
            if !(0.0..=1.0).contains(&g.formant_centralization) {
                return Err(SynthError::InvalidParameter("formant_centralization must lie in [0, 1]".into()));
            }
            if !(0.0..=24.0).contains(&g.loudness_range_db) {
                return Err(SynthError::InvalidParameter("loudness_range_db must lie in [0, 24]".into()));
            }
        }
        Ok(())
    }
}

/// Generating parameters of one speaker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerTruth {
    pub speaker_id: String,
    pub group: Group,
    pub sex: Sex,
    /// 0 for controls.
    pub severity: f64,
    pub f0: f64,
    pub jitter_pct: f64,
    pub shimmer_pct: f64,
    pub hnr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub recordings: Vec<Recording>,
    pub records: Vec<ClinicalRecord>,
    pub truth: Vec<SpeakerTruth>,
}

/// (F1, F2, F3) for each vowel, adult male.
fn vowel_formants(v: Vowel) -> [f64; 3] {
    match v {
        Vowel::A => [700.0, 1220.0, 2600.0],
        Vowel::E => [500.0, 1750.0, 2500.0],
        Vowel::I => [300.0, 2200.0, 2900.0],
        Vowel::O => [450.0, 850.0, 2500.0],
        Vowel::U => [320.0, 750.0, 2400.0],
    }
}

const NEUTRAL_FORMANTS: [f64; 3] = [500.0, 1500.0, 2500.0];
const BANDWIDTHS: [f64; 3] = [80.0, 90.0, 120.0];

struct Speaker {
    truth: SpeakerTruth,
    record: ClinicalRecord,
    profile: GroupProfile,
    /// Vocal-tract scaling of all formants.
    tract: f64,
    seed: u64,
}

fn normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    Normal::new(mean, sd).expect("finite positive sd").sample(rng)
}

/// `stream` separates speakers' random streams; `number` is the id within
/// the group.
fn draw_speaker(stream: usize, number: usize, group: Group, profile: &CohortProfile, seed: u64) -> Speaker {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64 + 1);
    let sex = if rng.random::<bool>() { Sex::F } else { Sex::M };
    let severity = match group {
        Group::Pd => rng.random_range(profile.severity_range.0..=profile.severity_range.1),
        Group::Hc => 0.0,
    };
    let voice = profile.hc.lerp(&profile.pd, severity);
    let f0 = match sex {
        Sex::M => normal(&mut rng, 120.0, 12.0),
        Sex::F => normal(&mut rng, 205.0, 18.0),
    }
    .clamp(80.0, 280.0);
    let spread = |rng: &mut ChaCha8Rng| normal(rng, 0.0, profile.speaker_spread.max(1e-12)).exp();
    let jitter_pct = (voice.jitter_pct * spread(&mut rng)).min(8.0);
    let shimmer_pct = (voice.shimmer_pct * spread(&mut rng)).min(9.0);
    let hnr_db = voice.hnr_db + normal(&mut rng, 0.0, profile.hnr_spread_db.max(1e-12));
    let tract = match sex {
        Sex::M => 1.0,
        Sex::F => 1.15,
    } * normal(&mut rng, 1.0, 0.03);
    let id = match group {
        Group::Pd => format!("P{number:03}"),
        Group::Hc => format!("C{number:03}"),
    };
    let age = normal(&mut rng, 66.0, 8.0).clamp(40.0, 90.0).round();
    let record = clinical_record(&id, group, sex, age, severity, &mut rng);
    Speaker {
        truth: SpeakerTruth {
            speaker_id: id,
            group,
            sex,
            severity,
            f0,
            jitter_pct,
            shimmer_pct,
            hnr_db,
        },
        record,
        profile: voice,
        tract,
        seed: rng.random(),
    }
}

/// Scores grow with severity plus independent noise; LED is only weakly
/// tied to severity. Controls carry no scores.
fn clinical_record(id: &str, group: Group, sex: Sex, age: f64, s: f64, rng: &mut ChaCha8Rng) -> ClinicalRecord {
    let mut r = ClinicalRecord {
        speaker_id: id.to_string(),
        group,
        sex,
        age,
        pd_duration: None,
        updrs3: None,
        updrs4: None,
        rbdsq: None,
        fog: None,
        nmss: None,
        bdi: None,
        mmse: None,
        led: None,
    };
    if group == Group::Hc {
        return r;
    }
    let mut score = |base: f64, slope: f64, sd: f64, max: f64| (base + slope * s + normal(rng, 0.0, sd)).clamp(0.0, max).round();
    r.updrs3 = Some(score(10.0, 40.0, 4.0, 132.0));
    r.updrs4 = Some(score(1.0, 8.0, 1.5, 24.0));
    r.rbdsq = Some(score(2.0, 7.0, 1.5, 13.0));
    r.fog = Some(score(1.0, 16.0, 3.0, 24.0));
    r.nmss = Some(score(15.0, 70.0, 10.0, 360.0));
    r.bdi = Some(score(4.0, 14.0, 3.0, 63.0));
    r.mmse = Some(score(29.5, -4.0, 1.0, 30.0));
    r.pd_duration = Some(((1.0 + 10.0 * s + normal(rng, 0.0, 2.0)).max(0.5) * 10.0).round() / 10.0);
    r.led = Some((350.0 + 200.0 * s + normal(rng, 0.0, 180.0)).max(0.0).round());
    r
}

fn recording_params(sp: &Speaker, vowel: Vowel, style: Style, profile: &CohortProfile, rng: &mut ChaCha8Rng) -> SynthesisParams {
    let v = &sp.profile;
    let mut formants = vowel_formants(vowel);
    for (f, neutral) in formants.iter_mut().zip(NEUTRAL_FORMANTS) {
        *f = (*f + v.formant_centralization * (neutral - *f)) * sp.tract * normal(rng, 1.0, 0.015);
    }
    let half_range = v.loudness_range_db / 2.0;
    let (intensity, f0_scale, duration) = match style {
        Style::S => (0.0, 1.0, profile.short_duration),
        Style::L => (0.0, 1.0, profile.sustained_duration),
        Style::Ll => (half_range, 1.08, profile.sustained_duration),
        Style::Ls => (-half_range, 0.96, profile.sustained_duration),
    };
    let wobble = |rng: &mut ChaCha8Rng| normal(rng, 0.0, 0.08).exp();
    SynthesisParams {
        f0: (sp.truth.f0 * f0_scale * normal(rng, 1.0, 0.02)).clamp(60.0, 400.0),
        jitter_pct: (sp.truth.jitter_pct * wobble(rng)).min(10.0),
        shimmer_pct: (sp.truth.shimmer_pct * wobble(rng)).min(10.0),
        hnr_target: sp.truth.hnr_db + normal(rng, 0.0, 0.7),
        formants,
        bandwidths: BANDWIDTHS,
        duration: duration * rng.random_range(1.0..1.15),
        intensity: intensity + normal(rng, 0.0, 0.5),
        seed: rng.random(),
    }
}

/// PD speakers `P001..`, then controls `C001..`, each with all 20
/// vowel/style recordings at 16 kHz. Deterministic in `seed`.
pub fn generate_cohort(n_pd: usize, n_hc: usize, profile: &CohortProfile, seed: u64) -> Result<Cohort, SynthError> {
    if n_pd < MIN_GROUP_SIZE || n_hc < MIN_GROUP_SIZE {
        return Err(SynthError::InvalidParameter(format!(
            "each group needs at least {MIN_GROUP_SIZE} speakers (got {n_pd} PD, {n_hc} HC)"
        )));
    }
    profile.validate()?;
    let speakers: Vec<Speaker> = (0..n_pd)
        .map(|i| draw_speaker(i, i + 1, Group::Pd, profile, seed))
        .chain((0..n_hc).map(|i| draw_speaker(n_pd + i, i + 1, Group::Hc, profile, seed)))
        .collect();

    let jobs: Vec<(usize, Vowel, Style, SynthesisParams)> = speakers
        .iter()
        .enumerate()
        .flat_map(|(k, sp)| {
            let mut rng = ChaCha8Rng::seed_from_u64(sp.seed);
            Vowel::ALL
                .iter()
                .flat_map(|&v| Style::ALL.iter().map(move |&s| (v, s)))
                .map(|(v, s)| (k, v, s, recording_params(sp, v, s, profile, &mut rng)))
                .collect::<Vec<_>>()
        })
        .collect();
    let recordings = jobs
        .par_iter()
        .map(|(k, vowel, style, params)| {
            let id = RecordingId {
                speaker_id: speakers[*k].truth.speaker_id.clone(),
                vowel: *vowel,
                style: *style,
            };
            synthesize_vowel(id, params)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Cohort {
        recordings,
        records: speakers.iter().map(|s| s.record.clone()).collect(),
        truth: speakers.into_iter().map(|s| s.truth).collect(),
    })
}

pub const METADATA_FILE: &str = "metadata.csv";
pub const TRUTH_FILE: &str = "truth.json";

/// Write `<speaker>_<vowel>_<style>.wav` files, `metadata.csv` and the
/// generating parameters (`truth.json`) into `dir`.
pub fn write_cohort(cohort: &Cohort, dir: &Path) -> Result<(), SynthError> {
    std::fs::create_dir_all(dir).map_err(crate::corpus::CorpusError::from)?;
    cohort
        .recordings
        .par_iter()
        .try_for_each(|rec| write_wav(&dir.join(format!("{}.wav", rec.id.file_stem())), rec))?;
    let meta = File::create(dir.join(METADATA_FILE)).map_err(crate::corpus::CorpusError::from)?;
    write_metadata(BufWriter::new(meta), &cohort.records)?;
    let truth = File::create(dir.join(TRUTH_FILE)).map_err(crate::corpus::CorpusError::from)?;
    serde_json::to_writer_pretty(BufWriter::new(truth), &cohort.truth).map_err(crate::corpus::CorpusError::from)?;
    Ok(())
}
