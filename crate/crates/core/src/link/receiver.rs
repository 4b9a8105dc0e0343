use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{LinkError, NoiseModel};
use crate::device::{
    default_current_grid, find_mpp, segment_photocurrents, string_iv, IlluminationProfile, Mpp, OperatingPoint,
    SegmentedDevice, StringModel,
};
use crate::modem::OfdmConfig;
use crate::numeric::brent;

const MAX_LOAD: f64 = 10e3;

/// Converter loaded by `load_resistance`, followed by an amplifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverChain {
    pub device: SegmentedDevice,
    /// Beam at the cell plane, before `optical_transmission`.
    pub beam: IlluminationProfile,
    /// [Ω]
    #[serde(default = "default_load")]
    pub load_resistance: f64,
    #[serde(default)]
    pub amplifier_gain_db: f64,
    /// Scalar power transmission of the optical path.
    #[serde(default = "default_transmission")]
    pub optical_transmission: f64,
    #[serde(default)]
    pub noise: NoiseModel,
}

fn default_load() -> f64 {
    950.0
}

fn default_transmission() -> f64 {
    1.0
}

/// DC state of the receiver: photocurrents, the load-line operating point
/// and the maximum power point of the same characteristic.
#[derive(Debug, Clone, PartialEq)]
pub struct DcState {
    pub photocurrents: Vec<f64>,
    /// Optical power landing on the active area [W].
    pub captured_power: f64,
    pub model: StringModel,
    /// Intersection of the string characteristic with `V = I·R_L`.
    pub operating_point: OperatingPoint,
    pub mpp: Mpp,
    pub short_circuit_current: f64,
    pub open_circuit_voltage: f64,
    /// Fraction of an AC photocurrent that reaches the load, `r/(r + R_L)`
    /// with `r` the string's dynamic resistance at the operating point.
    pub small_signal_factor: f64,
}

impl DcState {
    pub fn imp_isc(&self) -> Option<f64> {
        (self.short_circuit_current > 0.0).then(|| self.mpp.point.current / self.short_circuit_current)
    }
}

impl ReceiverChain {
    pub fn new(device: SegmentedDevice, beam: IlluminationProfile) -> Self {
        Self {
            device,
            beam,
            load_resistance: default_load(),
            amplifier_gain_db: 0.0,
            optical_transmission: default_transmission(),
            noise: NoiseModel::default(),
        }
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        self.device.validate()?;
        self.beam.validate()?;
        self.noise.validate()?;
        if !(self.load_resistance > 0.0 && self.load_resistance <= MAX_LOAD) {
            return Err(LinkError::InvalidParameter {
                name: "load_resistance",
                value: self.load_resistance,
                reason: "must lie in (0, 10 kΩ]",
            });
        }
        if !(self.optical_transmission > 0.0 && self.optical_transmission <= 1.0) {
            return Err(LinkError::InvalidParameter {
                name: "optical_transmission",
                value: self.optical_transmission,
                reason: "must lie in (0, 1]",
            });
        }
        if !self.amplifier_gain_db.is_finite() {
            return Err(LinkError::InvalidParameter {
                name: "amplifier_gain_db",
                value: self.amplifier_gain_db,
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// Beam after the optical path.
    pub fn incident_beam(&self) -> IlluminationProfile {
        IlluminationProfile { total_optical_power: self.beam.total_optical_power * self.optical_transmission, ..self.beam.clone() }
    }

    pub fn amplifier_gain(&self) -> f64 {
        10f64.powf(self.amplifier_gain_db / 20.0)
    }

    pub fn bandwidth(&self) -> f64 {
        self.device.bandwidth(self.load_resistance)
    }

    pub fn dc_state(&self) -> Result<DcState, LinkError> {
        self.validate()?;
        let beam = self.incident_beam();
        let photocurrents = segment_photocurrents(&self.device.geometry, &beam)?;
        let captured_power = photocurrents.iter().sum::<f64>() / beam.responsivity;
        let model = self.device.model(&photocurrents)?;
        let isc = model.short_circuit_current()?;
        let voc = model.voltage(0.0)?.0;
        let curve = string_iv(&self.device, &photocurrents, &default_current_grid(&model, 2048)?)?;
        let mpp = find_mpp(&curve)?;
        let rl = self.load_resistance;
        let operating_point = if isc == 0.0 {
            OperatingPoint::new(0.0, 0.0)
        } else {
            let mut err = None;
            let i = brent(
                |i| match model.voltage(i) {
                    Ok((v, _)) => v - i * rl,
                    Err(e) => {
                        err = Some(e);
                        f64::NAN
                    }
                },
                0.0,
                isc,
                1e-18,
                4.0 * f64::EPSILON,
                300,
            )
            .map_err(|_| LinkError::NoConvergence { what: "load-line operating point" })?;
            if let Some(e) = err {
                return Err(e.into());
            }
            OperatingPoint::new(i * rl, i)
        };
        let r = -model.slope(operating_point.current)?;
        let small_signal_factor = if r > 0.0 { r / (r + rl) } else { 0.0 };
        Ok(DcState {
            photocurrents,
            captured_power,
            model,
            operating_point,
            mpp,
            short_circuit_current: isc,
            open_circuit_voltage: voc,
            small_signal_factor,
        })
    }
}

/// First-order receiver response `H(f) = g/(1 + j f/f3)`; `gain` is in volts
/// at the amplifier output per watt of optical modulation in the beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelResponse {
    pub gain: f64,
    pub f3db: f64,
}

impl ChannelResponse {
    pub fn at(&self, f: f64) -> Complex64 {
        Complex64::new(self.gain, 0.0) / Complex64::new(1.0, f / self.f3db)
    }

    /// Response at each data carrier of `cfg`.
    pub fn carrier_gains(&self, cfg: &OfdmConfig) -> Vec<Complex64> {
        (0..cfg.data_subcarriers).map(|k| self.at(cfg.carrier_frequency(k))).collect()
    }
}

pub fn channel_response(rx: &ReceiverChain) -> Result<ChannelResponse, LinkError> {
    let dc = rx.dc_state()?;
    Ok(response_from(rx, &dc))
}

pub(crate) fn response_from(rx: &ReceiverChain, dc: &DcState) -> ChannelResponse {
    let fraction = if rx.beam.total_optical_power > 0.0 { dc.captured_power / rx.beam.total_optical_power } else { 0.0 };
    let gain = rx.beam.responsivity * fraction * rx.load_resistance * dc.small_signal_factor * rx.amplifier_gain();
    ChannelResponse { gain, f3db: rx.bandwidth() }
}
