//! Vowel-space metrics over the corner vowels [a], [i], [u].

use serde::{Deserialize, Serialize};

/// Median F1/F2 of one corner vowel, Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerFormants {
    pub f1: f64,
    pub f2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VowelSpaceMetrics {
    /// Hz².
    pub vsa: f64,
    /// Absent when the triangle is degenerate.
    pub ln_vsa: Option<f64>,
    pub fcr: f64,
    pub vai: f64,
    pub f2i_f2u: f64,
}

impl VowelSpaceMetrics {
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("VSA", self.vsa)];
        if let Some(l) = self.ln_vsa {
            out.push(("lnVSA", l));
        }
        out.extend([("FCR", self.fcr), ("VAI", self.vai), ("F2i/F2u", self.f2i_f2u)]);
        out
    }
}

/// Triangle area (shoelace), centralization ratio, articulation index and
/// the F2 ratio of [i] to [u].
pub fn vowel_space(a: CornerFormants, i: CornerFormants, u: CornerFormants) -> VowelSpaceMetrics {
    let vsa = (i.f1 * (a.f2 - u.f2) + a.f1 * (u.f2 - i.f2) + u.f1 * (i.f2 - a.f2)).abs() / 2.0;
    let vai = (i.f2 + a.f1) / (i.f1 + u.f1 + u.f2 + a.f2);
    VowelSpaceMetrics {
        vsa,
        ln_vsa: (vsa > 0.0).then(|| vsa.ln()),
        fcr: 1.0 / vai,
        vai,
        f2i_f2u: i.f2 / u.f2,
    }
}
