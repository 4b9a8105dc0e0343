//! Batch front end for the `slipt-core` simulator.
//!
//! An [`ExperimentSpec`] names what to run; [`run`] executes it and writes
//! CSV artifacts, each stamped with the spec hash and seed. The `slipt`
//! binary is a thin clap layer that either reads a spec file or builds one
//! from flags.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod artifact;
pub mod harness;
pub mod plot;
pub mod spec;

pub use artifact::{ArtifactSink, Provenance};
pub use harness::{load_calibration, run, RunContext, RunOutcome, CALIBRATION_FILE};
pub use plot::{emit_plot_data, PlotInput, PlotKind, Series};
pub use spec::{ExperimentKind, ExperimentSpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The spec or a file it references is malformed.
    #[error("spec error: {0}")]
    Spec(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(
        "no calibration artifact at {}; run `slipt calibrate --out <dir>` first, \
         or pass --calibration <file> pointing at an existing {CALIBRATION_FILE}",
        .0.display()
    )]
    MissingCalibration(PathBuf),
    #[error("calibration artifact {}: {reason}", path.display())]
    BadCalibration { path: PathBuf, reason: String },
    #[error(transparent)]
    Link(#[from] slipt_core::link::LinkError),
    #[error(transparent)]
    Device(#[from] slipt_core::device::DeviceError),
    #[error(transparent)]
    Safety(#[from] slipt_core::safety::SafetyError),
    #[error(transparent)]
    Format(#[from] slipt_core::formats::FormatError),
}

impl From<slipt_core::presets::PresetError> for HarnessError {
    fn from(e: slipt_core::presets::PresetError) -> Self {
        Self::Spec(e.to_string())
    }
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// 2 for spec problems, 1 for everything that went wrong while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Spec(_) => 2,
            _ => 1,
        }
    }
}
