//! Experiment description files.
//!
//! ```toml
//! schema_version = 1
//! kind = "link"
//! seed = 7
//! presets = ["L2", "L4", "L6"]
//!
//! [link]
//! ber_target = 4.7e-3
//! ```
//!
//! Every field except `schema_version` and `kind` has a default. Unknown
//! keys are rejected so that typos surface as errors instead of silently
//! falling back to defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use slipt_core::safety::SafetyScenario;

use crate::HarnessError;

pub const SPEC_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Iv,
    BandwidthSweep,
    Link,
    Mismatch,
    Safety,
    Calibrate,
    ReproduceTable1,
    ReproduceFig6,
    ReproduceFig3,
}

impl ExperimentKind {
    pub fn needs_calibration(self) -> bool {
        matches!(self, Self::ReproduceTable1 | Self::ReproduceFig6 | Self::ReproduceFig3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Preset names the experiment runs over, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub presets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Preset library replacing the built-in one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset_file: Option<PathBuf>,
    /// Calibration artifact; defaults to `calibration.toml` in the output
    /// directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<PathBuf>,
    /// Use calibrated device parameters even where not required.
    #[serde(default)]
    pub calibrated: bool,
    #[serde(default)]
    pub link: LinkSection,
    #[serde(default)]
    pub bandwidth: BandwidthSection,
    #[serde(default)]
    pub mismatch: MismatchSection,
    #[serde(default)]
    pub iv: IvSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safety: Option<SafetyScenario>,
    /// Explicit link configurations; when empty, one run per preset.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepEntry>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub ber_target: f64,
    pub training_frames: usize,
    pub payload_frames: usize,
    pub clipping: bool,
    pub snr_smoothing: usize,
    /// Apply each configuration's calibrated beam offset.
    pub calibrated_offsets: bool,
    /// Multiplier on the receiver noise PSD.
    pub psd_scale: Option<f64>,
}

impl Default for LinkSection {
    fn default() -> Self {
        let o = slipt_core::link::LinkOptions::default();
        Self {
            ber_target: o.ber_target,
            training_frames: o.training_frames,
            payload_frames: o.payload_frames,
            clipping: o.clipping,
            snr_smoothing: o.snr_smoothing,
            calibrated_offsets: false,
            psd_scale: None,
        }
    }
}

impl LinkSection {
    pub fn options(&self) -> slipt_core::link::LinkOptions {
        slipt_core::link::LinkOptions {
            ber_target: self.ber_target,
            training_frames: self.training_frames,
            payload_frames: self.payload_frames,
            clipping: self.clipping,
            snr_smoothing: self.snr_smoothing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub preset: String,
    /// Defaults to the preset name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// [Ω]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_resistance: Option<f64>,
    /// Beam offset [mm].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
}

impl SweepEntry {
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.preset)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandwidthSection {
    /// [Ω]; empty means the library's load.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub load_resistances: Vec<f64>,
    /// Re-split each preset's cell into these counts; empty keeps the preset.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MismatchSection {
    /// Largest offset [mm]; the sweep starts at zero.
    pub max_offset: f64,
    pub points: usize,
}

impl Default for MismatchSection {
    fn default() -> Self {
        Self { max_offset: 0.95, points: 20 }
    }
}

impl MismatchSection {
    pub fn offsets(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![0.0],
            n => (0..n).map(|k| self.max_offset * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IvSection {
    pub points: usize,
    /// Beam offset [mm].
    pub offset: f64,
}

impl Default for IvSection {
    fn default() -> Self {
        Self { points: 512, offset: 0.0 }
    }
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            schema_version: SPEC_SCHEMA_VERSION,
            kind,
            seed: DEFAULT_SEED,
            presets: Vec::new(),
            output_dir: None,
            preset_file: None,
            calibration: None,
            calibrated: false,
            link: LinkSection::default(),
            bandwidth: BandwidthSection::default(),
            mismatch: MismatchSection::default(),
            iv: IvSection::default(),
            safety: None,
            sweep: Vec::new(),
        }
    }

    /// Parses and checks a spec; errors carry the line and field.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let spec: Self = toml::from_str(text).map_err(|e| HarnessError::Spec(e.to_string().trim_end().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serialises")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Spec(m));
        if self.schema_version != SPEC_SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {}, expected {SPEC_SCHEMA_VERSION}",
                self.schema_version
            ));
        }
        let l = &self.link;
        if !(l.ber_target > 0.0 && l.ber_target < 0.5) {
            return bad(format!("link.ber_target = {} must lie in (0, 0.5)", l.ber_target));
        }
        if let Some(s) = l.psd_scale {
            if !(s.is_finite() && s >= 0.0) {
                return bad(format!("link.psd_scale = {s} must be finite and >= 0"));
            }
        }
        if !(self.mismatch.max_offset.is_finite() && self.mismatch.max_offset >= 0.0) {
            return bad(format!("mismatch.max_offset = {} must be >= 0", self.mismatch.max_offset));
        }
        if self.iv.points < 8 {
            return bad(format!("iv.points = {} must be at least 8", self.iv.points));
        }
        if !self.iv.offset.is_finite() {
            return bad("iv.offset must be finite".into());
        }
        for r in &self.bandwidth.load_resistances {
            if !(r.is_finite() && *r > 0.0) {
                return bad(format!("bandwidth.load_resistances contains {r}; loads must be > 0"));
            }
        }
        if self.bandwidth.segments.contains(&0) {
            return bad("bandwidth.segments must be >= 1".into());
        }
        let mut labels = std::collections::BTreeSet::new();
        for e in &self.sweep {
            let label = e.label();
            if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) || label.starts_with('.') {
                return bad(format!("sweep label {label:?} must be non-empty and use only [A-Za-z0-9._-]"));
            }
            if !labels.insert(label) {
                return bad(format!("duplicate sweep label {label:?}"));
            }
            if let Some(o) = e.offset {
                if !o.is_finite() {
                    return bad(format!("sweep `{label}`: offset must be finite"));
                }
            }
        }
        if self.kind == ExperimentKind::Safety && self.safety.is_none() {
            return bad("kind = \"safety\" requires a [safety] table".into());
        }
        if let Some(s) = &self.safety {
            s.validate().map_err(|e| HarnessError::Spec(format!("safety: {e}")))?;
        }
        Ok(())
    }
}
