//! End-to-end link: VCSEL transmitter, optical path, segmented receiver and
//! modem, plus calibration of the free device parameters.

mod calibration;
mod mismatch;
mod noise;
mod receiver;
mod run;
mod transmitter;

pub use calibration::{
    calibrate, fit_bandwidth, BandwidthFit, BandwidthTarget, CalibratedConfig, CalibrationResult, CalibrationTargets, ConfigTarget,
    MAX_RESIDUAL,
};
pub use mismatch::{edge_offset, mismatch_study, MismatchRow};
pub use noise::{NoiseModel, NoisePsd};
pub use receiver::{channel_response, ChannelResponse, DcState, ReceiverChain};
pub use run::{run_link, run_link_with, sweep, LinkOptions, LinkReport, LinkScenario};
pub use transmitter::{Emission, TransmitterModel};

use thiserror::Error;

use crate::device::DeviceError;
use crate::modem::ModemError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Modem(#[from] ModemError),
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("{targets} calibration targets cannot determine {params} parameters")]
    UnderDetermined { targets: usize, params: usize },
    #[error("calibration residual for {label} is {residual:.3} (limit {limit})")]
    Residual { label: String, residual: f64, limit: f64 },
    #[error("no calibration target named {0}")]
    MissingTarget(String),
    #[error("{what} did not converge")]
    NoConvergence { what: &'static str },
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<(), LinkError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(LinkError::InvalidParameter { name, value, reason: "must be finite and > 0" })
    }
}
