use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};
use std::f64::consts::PI;

use super::{check_positive, DeviceError, SegmentGeometry};
use crate::numeric::{ELEMENTARY_CHARGE, PLANCK, SPEED_OF_LIGHT};

/// Circular Gaussian beam on the cell plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IlluminationProfile {
    /// [W]
    pub total_optical_power: f64,
    /// 1/e² intensity radius [mm].
    pub beam_radius_1e2: f64,
    /// Beam centre relative to the cell centre [mm].
    #[serde(default)]
    pub center_offset: [f64; 2],
    /// [A/W]
    pub responsivity: f64,
}

impl IlluminationProfile {
    pub fn validate(&self) -> Result<(), DeviceError> {
        if !(self.total_optical_power >= 0.0 && self.total_optical_power.is_finite()) {
            return Err(DeviceError::InvalidParameter {
                name: "total_optical_power",
                value: self.total_optical_power,
                reason: "must be finite and >= 0",
            });
        }
        check_positive("beam_radius_1e2", self.beam_radius_1e2)?;
        check_positive("responsivity", self.responsivity)?;
        for &c in &self.center_offset {
            if !c.is_finite() {
                return Err(DeviceError::InvalidParameter {
                    name: "center_offset",
                    value: c,
                    reason: "must be finite",
                });
            }
        }
        Ok(())
    }

    /// Warns when the responsivity exceeds unit quantum efficiency.
    pub fn check_responsivity(&self, wavelength_nm: f64) {
        let limit = wavelength_nm * 1e-9 * ELEMENTARY_CHARGE / (PLANCK * SPEED_OF_LIGHT);
        if self.responsivity > limit {
            log::warn!(
                "responsivity {:.3} A/W exceeds the {:.3} A/W quantum limit at {wavelength_nm} nm",
                self.responsivity,
                limit
            );
        }
    }

    /// Peak irradiance [W/mm²].
    pub fn peak_irradiance(&self) -> f64 {
        2.0 * self.total_optical_power / (PI * self.beam_radius_1e2 * self.beam_radius_1e2)
    }

    pub fn offset_magnitude(&self) -> f64 {
        self.center_offset[0].hypot(self.center_offset[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    /// Absolute floor as a fraction of the total beam power.
    pub abs_tol_fraction: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol_fraction: 1e-14, max_panels: 1 << 16 }
    }
}

/// Segment photocurrents plus the quadrature bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Photocurrents {
    /// [A], one per segment.
    pub currents: Vec<f64>,
    /// Largest |S(2N) − S(N)| over sectors, in amperes.
    pub tolerance: f64,
    /// Panel count per sector of the returned estimate.
    pub panels: usize,
}

/// Beam power per radian of polar angle captured on `[0, R]` along `theta`.
///
/// The radial integral of a displaced Gaussian is closed-form; see the
/// expansion `|r − c|² = (r − u)² + d² sin²(θ − φ)` with `u = d cos(θ − φ)`.
fn radial_power(theta: f64, radius: f64, beam: &IlluminationProfile) -> f64 {
    let [cx, cy] = beam.center_offset;
    let w = beam.beam_radius_1e2;
    let a = 2.0 / (w * w);
    let sa = a.sqrt();
    let (s, c) = theta.sin_cos();
    let u = cx * c + cy * s;
    let perp = -cx * s + cy * c;

    let gauss = ((-a * u * u).exp() - (-a * (radius - u) * (radius - u)).exp()) / (2.0 * a);
    let erf_sum = if u < 0.0 {
        erfc(-sa * u) - erfc(sa * (radius - u))
    } else if u > radius {
        erfc(sa * (u - radius)) - erfc(sa * u)
    } else {
        erf(sa * (radius - u)) + erf(sa * u)
    };
    let linear = u * PI.sqrt() / (2.0 * sa) * erf_sum;
    beam.peak_irradiance() * (-a * perp * perp).exp() * (gauss + linear)
}

fn simpson(theta0: f64, theta1: f64, panels: usize, radius: f64, beam: &IlluminationProfile) -> f64 {
    let h = (theta1 - theta0) / panels as f64;
    let mut acc = radial_power(theta0, radius, beam) + radial_power(theta1, radius, beam);
    for k in 1..panels {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * radial_power(theta0 + k as f64 * h, radius, beam);
    }
    acc * h / 3.0
}

/// Optical power on each sector at a fixed Simpson resolution (`panels` even).
pub fn sector_powers_at_resolution(geometry: &SegmentGeometry, beam: &IlluminationProfile, panels: usize) -> Vec<f64> {
    let n = geometry.n_segments;
    let panels = panels.max(2) + panels % 2;
    let width = 2.0 * PI / n as f64;
    (0..n)
        .map(|i| {
            if beam.total_optical_power == 0.0 {
                0.0
            } else {
                simpson(i as f64 * width, (i + 1) as f64 * width, panels, geometry.radius(), beam).max(0.0)
            }
        })
        .collect()
}

/// Responsivity-weighted power captured by each pizza sector, with the
/// panel count doubled until every sector meets the tolerance.
pub fn segment_photocurrents_with(
    geometry: &SegmentGeometry,
    beam: &IlluminationProfile,
    opts: QuadratureOptions,
) -> Result<Photocurrents, DeviceError> {
    geometry.validate()?;
    beam.validate()?;
    let n = geometry.n_segments;
    if beam.total_optical_power == 0.0 {
        return Ok(Photocurrents { currents: vec![0.0; n], tolerance: 0.0, panels: 0 });
    }
    let floor = opts.abs_tol_fraction * beam.total_optical_power;
    let mut panels = 16;
    let mut coarse = sector_powers_at_resolution(geometry, beam, panels);
    loop {
        let fine = sector_powers_at_resolution(geometry, beam, 2 * panels);
        let diff = coarse.iter().zip(&fine).map(|(c, f)| (f - c).abs()).fold(0.0, f64::max);
        let converged = coarse
            .iter()
            .zip(&fine)
            .all(|(c, f)| (f - c).abs() <= (opts.rel_tol * f.abs()).max(floor));
        panels *= 2;
        if converged {
            return Ok(Photocurrents {
                currents: fine.iter().map(|p| p * beam.responsivity).collect(),
                tolerance: diff * beam.responsivity,
                panels,
            });
        }
        if panels >= opts.max_panels {
            let total: f64 = fine.iter().sum();
            return Err(DeviceError::Quadrature { achieved: diff / total.max(floor), requested: opts.rel_tol });
        }
        coarse = fine;
    }
}

/// [`segment_photocurrents_with`] at default tolerances.
pub fn segment_photocurrents(geometry: &SegmentGeometry, beam: &IlluminationProfile) -> Result<Vec<f64>, DeviceError> {
    segment_photocurrents_with(geometry, beam, QuadratureOptions::default()).map(|p| p.currents)
}
