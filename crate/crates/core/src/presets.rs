//! Built-in device presets and the reference link setup.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::device::{DeviceError, DiodeParams, IlluminationProfile, ReverseModel, SegmentGeometry, SegmentedDevice};
use crate::link::{
    edge_offset, CalibrationResult, CalibrationTargets, ConfigTarget, NoiseModel, ReceiverChain, TransmitterModel,
};
use crate::modem::OfdmConfig;

/// Source text of the built-in library.
pub const BUILTIN: &str = include_str!("../presets/default.toml");

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresetError {
    #[error("preset file: {0}")]
    Parse(String),
    #[error("unsupported preset schema_version {0}, expected {SCHEMA_VERSION}")]
    Schema(u32),
    #[error("unknown preset `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Device(#[from] DeviceError),
}

/// Reference measurements for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measured {
    /// [Hz]
    pub bandwidth: f64,
    /// [W]
    pub pmp: f64,
    pub imp_isc: f64,
    pub pce: f64,
    /// [bit/s]
    pub data_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DevicePreset {
    pub name: String,
    /// [mm]
    pub cell_diameter: f64,
    pub n_segments: usize,
    /// Junction area per segment including interconnect [mm²]; derived
    /// from the active area when absent.
    pub junction_area: Option<f64>,
    pub measured: Option<Measured>,
}

impl DevicePreset {
    pub fn geometry(&self) -> Result<SegmentGeometry, DeviceError> {
        let g = SegmentGeometry::new(self.cell_diameter, self.n_segments)?;
        match self.junction_area {
            Some(a) => g.with_junction_area(a),
            None => Ok(g),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverDefaults {
    pub load_resistance: f64,
    pub amplifier_gain_db: f64,
    pub optical_transmission: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetLibrary {
    pub schema_version: u32,
    pub responsivity_reference: String,
    pub lateral_resistivity: f64,
    pub diode: DiodeParams,
    pub reverse: ReverseModel,
    pub beam: IlluminationProfile,
    pub receiver: ReceiverDefaults,
    pub noise: NoiseModel,
    pub transmitter: TransmitterModel,
    pub modem: OfdmConfig,
    #[serde(rename = "device")]
    pub devices: Vec<DevicePreset>,
}

impl PresetLibrary {
    pub fn builtin() -> Self {
        Self::from_toml(BUILTIN).expect("built-in presets parse")
    }

    pub fn from_toml(text: &str) -> Result<Self, PresetError> {
        let lib: Self = toml::from_str(text).map_err(|e| PresetError::Parse(e.to_string()))?;
        if lib.schema_version != SCHEMA_VERSION {
            return Err(PresetError::Schema(lib.schema_version));
        }
        for d in &lib.devices {
            d.geometry()?;
        }
        Ok(lib)
    }

    pub fn preset(&self, name: &str) -> Result<&DevicePreset, PresetError> {
        self.devices.iter().find(|d| d.name == name).ok_or_else(|| PresetError::Unknown(name.to_string()))
    }

    /// Named device with the library's diode and lateral resistivity, or
    /// with calibrated values when `calibration` is given.
    pub fn device(&self, name: &str, calibration: Option<&CalibrationResult>) -> Result<SegmentedDevice, PresetError> {
        let p = self.preset(name)?;
        let (diode, rho) = match calibration {
            Some(c) => (c.diode(&self.diode), c.lateral_resistivity),
            None => (self.diode.clone(), self.lateral_resistivity),
        };
        Ok(SegmentedDevice {
            name: p.name.clone(),
            geometry: p.geometry()?,
            diode,
            reverse: self.reverse,
            lateral_resistivity: rho,
        })
    }

    /// Receiver for `name` with the beam moved `offset` mm along
    /// [`edge_offset`].
    pub fn receiver(
        &self,
        name: &str,
        offset: f64,
        calibration: Option<&CalibrationResult>,
    ) -> Result<ReceiverChain, PresetError> {
        let device = self.device(name, calibration)?;
        let mut beam = self.beam.clone();
        beam.center_offset = edge_offset(offset);
        if let Some(c) = calibration {
            beam.responsivity = c.responsivity;
        }
        Ok(ReceiverChain {
            device,
            beam,
            load_resistance: calibration.map_or(self.receiver.load_resistance, |c| c.load_resistance),
            amplifier_gain_db: self.receiver.amplifier_gain_db,
            optical_transmission: self.receiver.optical_transmission,
            noise: self.noise.clone(),
        })
    }

    /// Calibration targets from every preset with measurements.
    pub fn calibration_targets(&self) -> Result<CalibrationTargets, PresetError> {
        let mut configs = Vec::new();
        for d in &self.devices {
            if let Some(m) = d.measured {
                configs.push(ConfigTarget {
                    label: d.name.clone(),
                    geometry: d.geometry()?,
                    bandwidth: Some(m.bandwidth),
                    pmp: Some(m.pmp),
                    imp_isc: Some(m.imp_isc),
                });
            }
        }
        Ok(CalibrationTargets {
            diode: self.diode.clone(),
            reverse: self.reverse,
            beam: self.beam.clone(),
            load_resistance: self.receiver.load_resistance,
            responsivity_reference: self.responsivity_reference.clone(),
            configs,
        })
    }
}
