use serde::{Deserialize, Serialize};

use super::{check_positive, LinkError};

/// Biased VCSEL with a piecewise-linear L-I characteristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransmitterModel {
    /// [V]
    pub bias_voltage: f64,
    /// [A]
    pub bias_current: f64,
    /// Drive swing at the clip level, peak to peak [V].
    pub drive_amplitude: f64,
    /// Converts drive voltage to diode current [Ω].
    pub modulation_impedance: f64,
    /// [W/A]
    pub slope_efficiency: f64,
    /// [A]
    pub threshold_current: f64,
    /// Upper end of the linear region [A].
    pub saturation_current: f64,
    /// [nm]
    pub wavelength: f64,
}

impl Default for TransmitterModel {
    fn default() -> Self {
        Self {
            bias_voltage: 1.78,
            bias_current: 6e-3,
            drive_amplitude: 1.0,
            modulation_impedance: 100.0,
            slope_efficiency: 0.46,
            threshold_current: 1e-3,
            saturation_current: 12e-3,
            wavelength: 847.0,
        }
    }
}

/// Optical power samples and how much of the drive fell outside the
/// linear region.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub power: Vec<f64>,
    pub clip_fraction: f64,
}

impl Emission {
    pub fn clipped(&self) -> bool {
        self.clip_fraction > 0.0
    }
}

impl TransmitterModel {
    pub fn validate(&self) -> Result<(), LinkError> {
        check_positive("bias_current", self.bias_current)?;
        check_positive("drive_amplitude", self.drive_amplitude)?;
        check_positive("modulation_impedance", self.modulation_impedance)?;
        check_positive("slope_efficiency", self.slope_efficiency)?;
        check_positive("wavelength", self.wavelength)?;
        if !(self.threshold_current >= 0.0 && self.threshold_current < self.bias_current) {
            return Err(LinkError::InvalidParameter {
                name: "threshold_current",
                value: self.threshold_current,
                reason: "must lie in [0, bias_current)",
            });
        }
        if !(self.saturation_current > self.bias_current) {
            return Err(LinkError::InvalidParameter {
                name: "saturation_current",
                value: self.saturation_current,
                reason: "must exceed bias_current",
            });
        }
        Ok(())
    }

    /// Mean optical output at the bias point [W].
    pub fn emitted_power(&self) -> f64 {
        self.slope_efficiency * (self.bias_current - self.threshold_current)
    }

    /// Peak current deviation at full drive [A].
    pub fn current_swing(&self) -> f64 {
        0.5 * self.drive_amplitude / self.modulation_impedance
    }

    /// Optical output for a single drive current.
    pub fn light(&self, current: f64) -> f64 {
        self.slope_efficiency * (current.clamp(self.threshold_current, self.saturation_current) - self.threshold_current)
    }

    /// Drives the laser with `samples`, where `±full_scale` maps to the
    /// full peak-to-peak drive swing.
    pub fn modulate(&self, samples: &[f64], full_scale: f64) -> Emission {
        let k = self.current_swing() / full_scale;
        let mut clipped = 0usize;
        let power = samples
            .iter()
            .map(|&x| {
                let i = self.bias_current + k * x;
                if i < self.threshold_current || i > self.saturation_current {
                    clipped += 1;
                }
                self.light(i)
            })
            .collect();
        let clip_fraction = if samples.is_empty() { 0.0 } else { clipped as f64 / samples.len() as f64 };
        Emission { power, clip_fraction }
    }
}
