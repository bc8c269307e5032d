//! Acoustic analysis of sustained and short vowel phonation.
//!
//! The crate covers the full chain from WAV ingestion to classification:
//! frame-level feature extraction ([`conventional`], [`perceptual`]),
//! scalarization ([`functionals`]), univariate statistics ([`screening`]),
//! two-stage feature selection ([`selection`]), random-forest evaluation
//! ([`model`]) a synthetic cohort generator ([`synth`]) for testing, and the
//! [`pipeline`] that ties them together.

pub mod corpus;
pub mod dsp;
pub mod conventional;
pub mod functionals;
pub mod perceptual;
pub mod pipeline;
pub mod model;
pub mod screening;
pub mod selection;
pub mod synth;
