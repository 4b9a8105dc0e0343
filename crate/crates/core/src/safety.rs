//! Ocular MPE check for extended laser sources in the 700–1050 nm band.
//!
//! Inputs arrive in display units (nm, mm, s, W) and are converted to SI on
//! entry. Only the large-source branch of the MPE formula is implemented;
//! anything else is an explicit error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest subtense of an extended source [rad].
pub const ALPHA_MIN: f64 = 1.5e-3;
/// Subtense above which a source counts as large [rad].
pub const ALPHA_MAX: f64 = 100e-3;
pub const WAVELENGTH_RANGE_NM: (f64, f64) = (700.0, 1050.0);

const MM: f64 = 1e-3;
const NM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SafetyError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("wavelength {0} nm is outside the implemented 700-1050 nm branch")]
    UnsupportedWavelength(f64),
    #[error("angular subtense {alpha:.4e} rad is not a large source; only alpha > {ALPHA_MAX} rad is implemented")]
    UnsupportedSubtense { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceClass {
    Point,
    Intermediate,
    Large,
}

impl std::fmt::Display for SourceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Point => "point",
            Self::Intermediate => "intermediate",
            Self::Large => "large",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Safe,
    /// Irradiance equals the limit.
    AtLimit,
    Unsafe,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Safe => "safe",
            Self::AtLimit => "unsafe-boundary",
            Self::Unsafe => "unsafe",
        })
    }
}

/// Exposure geometry in display units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyScenario {
    /// nm
    pub wavelength: f64,
    /// Apparent source diameter D_s [mm].
    pub source_diameter: f64,
    /// Source to eye distance Z [mm].
    pub evaluation_distance: f64,
    /// s
    pub exposure_time: f64,
    /// Power through the pupil aperture P_r [W].
    pub received_power_at_pupil: f64,
    /// mm
    pub pupil_radius: f64,
}

impl Default for SafetyScenario {
    /// 850 nm beam, 35 mm at 100 mm, 30 ks, 80 µW through a 3.5 mm pupil.
    fn default() -> Self {
        Self {
            wavelength: 850.0,
            source_diameter: 35.0,
            evaluation_distance: 100.0,
            exposure_time: 30_000.0,
            received_power_at_pupil: 80e-6,
            pupil_radius: 3.5,
        }
    }
}

impl SafetyScenario {
    pub fn validate(&self) -> Result<(), SafetyError> {
        let checks = [
            ("wavelength", self.wavelength),
            ("source_diameter", self.source_diameter),
            ("evaluation_distance", self.evaluation_distance),
            ("exposure_time", self.exposure_time),
            ("received_power_at_pupil", self.received_power_at_pupil),
            ("pupil_radius", self.pupil_radius),
        ];
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(SafetyError::InvalidParameter { name, value, reason: "must be positive and finite" });
            }
        }
        Ok(())
    }
}

/// The same scenario with every quantity in SI base units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiScenario {
    pub wavelength: f64,
    pub source_diameter: f64,
    pub evaluation_distance: f64,
    pub exposure_time: f64,
    pub received_power_at_pupil: f64,
    pub pupil_radius: f64,
}

impl SafetyScenario {
    pub fn to_si(&self) -> SiScenario {
        SiScenario {
            wavelength: self.wavelength * NM,
            source_diameter: self.source_diameter * MM,
            evaluation_distance: self.evaluation_distance * MM,
            exposure_time: self.exposure_time,
            received_power_at_pupil: self.received_power_at_pupil,
            pupil_radius: self.pupil_radius * MM,
        }
    }

    pub fn from_si(si: &SiScenario) -> Self {
        Self {
            wavelength: si.wavelength / NM,
            source_diameter: si.source_diameter / MM,
            evaluation_distance: si.evaluation_distance / MM,
            exposure_time: si.exposure_time,
            received_power_at_pupil: si.received_power_at_pupil,
            pupil_radius: si.pupil_radius / MM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SafetyReport {
    /// rad
    pub angular_subtense: f64,
    pub class: SourceClass,
    pub c4: f64,
    pub c6: f64,
    /// W/m²
    pub mpe: f64,
    /// W/m²
    pub irradiance: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

/// `2 atan(D_s / 2Z)`, lengths in any common unit.
pub fn angular_subtense(source_diameter: f64, distance: f64) -> Result<f64, SafetyError> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(SafetyError::InvalidParameter { name: "distance", value: distance, reason: "must be positive" });
    }
    if !(source_diameter.is_finite() && source_diameter >= 0.0) {
        return Err(SafetyError::InvalidParameter {
            name: "source_diameter",
            value: source_diameter,
            reason: "must be non-negative",
        });
    }
    Ok(2.0 * (source_diameter / (2.0 * distance)).atan())
}

pub fn classify(alpha: f64) -> SourceClass {
    if alpha < ALPHA_MIN {
        SourceClass::Point
    } else if alpha < ALPHA_MAX {
        SourceClass::Intermediate
    } else {
        SourceClass::Large
    }
}

pub fn c4(wavelength_nm: f64) -> Result<f64, SafetyError> {
    let (lo, hi) = WAVELENGTH_RANGE_NM;
    if !(lo..=hi).contains(&wavelength_nm) {
        return Err(SafetyError::UnsupportedWavelength(wavelength_nm));
    }
    Ok(10f64.powf(0.002 * (wavelength_nm - 700.0)))
}

/// Large-source retinal MPE `18 C4 C6 t^-0.25` [W/m²].
pub fn mpe_extended(wavelength_nm: f64, alpha: f64, exposure_time: f64) -> Result<f64, SafetyError> {
    let c4 = c4(wavelength_nm)?;
    if alpha.is_nan() || alpha <= ALPHA_MAX {
        return Err(SafetyError::UnsupportedSubtense { alpha });
    }
    if !(exposure_time.is_finite() && exposure_time > 0.0) {
        return Err(SafetyError::InvalidParameter {
            name: "exposure_time",
            value: exposure_time,
            reason: "must be positive",
        });
    }
    Ok(18.0 * c4 * (ALPHA_MAX / ALPHA_MIN) * exposure_time.powf(-0.25))
}

/// `P_r / (π r_p²)` with `r_p` in metres.
pub fn pupil_irradiance(power: f64, pupil_radius_m: f64) -> Result<f64, SafetyError> {
    if !(pupil_radius_m.is_finite() && pupil_radius_m > 0.0) {
        return Err(SafetyError::InvalidParameter {
            name: "pupil_radius",
            value: pupil_radius_m,
            reason: "must be positive",
        });
    }
    if !(power.is_finite() && power >= 0.0) {
        return Err(SafetyError::InvalidParameter { name: "power", value: power, reason: "must be non-negative" });
    }
    Ok(power / (std::f64::consts::PI * pupil_radius_m * pupil_radius_m))
}

pub fn assess(scenario: &SafetyScenario) -> Result<SafetyReport, SafetyError> {
    scenario.validate()?;
    let si = scenario.to_si();
    let alpha = angular_subtense(si.source_diameter, si.evaluation_distance)?;
    let class = classify(alpha);
    // The C4 exponent is defined on the wavelength in nm.
    let mpe = mpe_extended(si.wavelength / NM, alpha, si.exposure_time)?;
    let irradiance = pupil_irradiance(si.received_power_at_pupil, si.pupil_radius)?;
    let margin = mpe / irradiance;
    let verdict = if margin > 1.0 {
        Verdict::Safe
    } else if margin == 1.0 {
        Verdict::AtLimit
    } else {
        Verdict::Unsafe
    };
    Ok(SafetyReport {
        angular_subtense: alpha,
        class,
        c4: c4(si.wavelength / NM)?,
        c6: ALPHA_MAX / ALPHA_MIN,
        mpe,
        irradiance,
        margin,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn subtense_limits() {
        assert_eq!(angular_subtense(0.0, 100.0).unwrap(), 0.0);
        assert!((angular_subtense(200.0, 100.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(angular_subtense(1.0, 0.0).is_err());
    }

    #[test]
    fn class_boundaries_are_half_open() {
        assert_eq!(classify(1.0e-3), SourceClass::Point);
        assert_eq!(classify(ALPHA_MIN), SourceClass::Intermediate);
        assert_eq!(classify(50e-3), SourceClass::Intermediate);
        assert_eq!(classify(ALPHA_MAX), SourceClass::Large);
    }

    #[test]
    fn c4_is_unity_at_700() {
        assert_eq!(c4(700.0).unwrap(), 1.0);
        assert!(c4(1100.0).is_err());
    }

    #[test]
    fn mpe_quarter_power_law() {
        let a = mpe_extended(850.0, 0.3, 100.0).unwrap();
        let b = mpe_extended(850.0, 0.3, 1600.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn only_large_branch() {
        assert!(matches!(mpe_extended(850.0, 0.05, 1.0), Err(SafetyError::UnsupportedSubtense { .. })));
        assert!(mpe_extended(850.0, ALPHA_MAX, 1.0).is_err());
    }

    #[test]
    fn irradiance_scaling() {
        assert_eq!(pupil_irradiance(0.0, 1e-3).unwrap(), 0.0);
        let e1 = pupil_irradiance(1e-3, 1e-3).unwrap();
        let e2 = pupil_irradiance(1e-3, 2e-3).unwrap();
        assert!((e1 / e2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_verdict() {
        let s = SafetyScenario::default();
        let r = assess(&s).unwrap();
        let r_p = s.pupil_radius * MM;
        let at_limit = SafetyScenario { received_power_at_pupil: r.mpe * PI * r_p * r_p, ..s };
        let b = assess(&at_limit).unwrap();
        assert!((b.margin - 1.0).abs() < 1e-12);
        assert_ne!(b.verdict, Verdict::Safe);
    }
}
