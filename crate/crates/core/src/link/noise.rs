use serde::{Deserialize, Serialize};

use super::{check_positive, LinkError};
use crate::numeric::{BOLTZMANN, ELEMENTARY_CHARGE};

/// Receiver noise referred to the load, as one-sided PSDs [V²/Hz].
///
/// `excess_psd` lumps the amplifier and digitiser contributions that are
/// not otherwise characterised; `psd_scale` multiplies the total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub temperature: f64,
    pub noise_figure_db: f64,
    pub excess_psd: f64,
    pub psd_scale: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self { temperature: 298.15, noise_figure_db: 6.0, excess_psd: 3e-13, psd_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePsd {
    pub thermal: f64,
    pub shot: f64,
    pub excess: f64,
    /// `psd_scale · F · (thermal + shot + excess)`.
    pub total: f64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), LinkError> {
        check_positive("temperature", self.temperature)?;
        check_positive("psd_scale", self.psd_scale)?;
        if !(self.noise_figure_db >= 0.0 && self.noise_figure_db.is_finite()) {
            return Err(LinkError::InvalidParameter {
                name: "noise_figure_db",
                value: self.noise_figure_db,
                reason: "must be finite and >= 0",
            });
        }
        if !(self.excess_psd >= 0.0 && self.excess_psd.is_finite()) {
            return Err(LinkError::InvalidParameter {
                name: "excess_psd",
                value: self.excess_psd,
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    pub fn noise_factor(&self) -> f64 {
        10f64.powf(self.noise_figure_db / 10.0)
    }

    /// PSD components across `load_resistance` carrying `current`.
    pub fn psd(&self, load_resistance: f64, current: f64) -> NoisePsd {
        let thermal = 4.0 * BOLTZMANN * self.temperature * load_resistance;
        let shot = 2.0 * ELEMENTARY_CHARGE * current.abs() * load_resistance * load_resistance;
        let excess = self.excess_psd;
        let total = self.psd_scale * self.noise_factor() * (thermal + shot + excess);
        NoisePsd { thermal, shot, excess, total }
    }
}
