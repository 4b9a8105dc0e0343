//! Electrical and small-signal model of an n-segment series-connected
//! photonic power converter.

mod capacitance;
mod diode;
mod geometry;
mod illumination;
mod mpp;
mod string;

pub use capacitance::{series_capacitance, small_signal_bandwidth, string_capacitance};
pub use diode::{segment_iv, segment_voltage, DiodeParams, SegmentVoltage};
pub use geometry::SegmentGeometry;
pub use illumination::{
    sector_powers_at_resolution, segment_photocurrents, segment_photocurrents_with, IlluminationProfile,
    Photocurrents, QuadratureOptions,
};
pub use mpp::{find_mpp, imp_isc_ratio, pce, Mpp, OperatingPoint};
pub use string::{default_current_grid, string_iv, IvCurve, IvPoint, ReverseModel, SegmentedDevice, StringModel};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeviceError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("sector quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("no bracket for the diode equation on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("segment current {current} A is not reachable without reverse conduction")]
    Infeasible { current: f64 },
    #[error("expected {expected} photocurrents, got {got}")]
    PhotocurrentCount { expected: usize, got: usize },
    #[error("curve has {got} points, at least {need} required")]
    TooFewPoints { got: usize, need: usize },
    #[error("curve points are not ordered by strictly increasing voltage")]
    Unordered,
    #[error("short-circuit current is zero; Imp/Isc is undefined")]
    ZeroShortCircuit,
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<(), DeviceError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(DeviceError::InvalidParameter { name, value, reason: "must be finite and > 0" })
    }
}
