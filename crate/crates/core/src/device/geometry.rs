use serde::{Deserialize, Serialize};

use super::{check_positive, DeviceError};

/// Circular active area cut into `n_segments` equal angular sectors.
///
/// Junction areas default to an equal split of the circle but may be
/// overridden: the measured junctions include interconnect regions that lie
/// outside the illuminated disc, so their sum can exceed the disc area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentGeometry {
    /// Diameter of the active disc [mm].
    pub cell_diameter: f64,
    pub n_segments: usize,
    /// Per-segment junction areas [mm²]; `None` derives them from the disc.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junction_area_override: Option<Vec<f64>>,
}

impl SegmentGeometry {
    pub fn new(cell_diameter: f64, n_segments: usize) -> Result<Self, DeviceError> {
        let g = Self { cell_diameter, n_segments, junction_area_override: None };
        g.validate()?;
        Ok(g)
    }

    /// Same junction area on every segment.
    pub fn with_junction_area(mut self, area: f64) -> Result<Self, DeviceError> {
        self.junction_area_override = Some(vec![area; self.n_segments]);
        self.validate()?;
        Ok(self)
    }

    pub fn with_junction_areas(mut self, areas: Vec<f64>) -> Result<Self, DeviceError> {
        self.junction_area_override = Some(areas);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        check_positive("cell_diameter", self.cell_diameter)?;
        if self.n_segments == 0 {
            return Err(DeviceError::InvalidParameter {
                name: "n_segments",
                value: 0.0,
                reason: "must be a positive integer",
            });
        }
        if !matches!(self.n_segments, 1 | 2 | 4 | 6) {
            log::warn!("n_segments = {} is outside the fabricated set {{1, 2, 4, 6}}", self.n_segments);
        }
        if let Some(areas) = &self.junction_area_override {
            if areas.len() != self.n_segments {
                return Err(DeviceError::InvalidParameter {
                    name: "junction_area_override",
                    value: areas.len() as f64,
                    reason: "length must equal n_segments",
                });
            }
            for &a in areas {
                check_positive("junction_area_override", a)?;
            }
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.cell_diameter
    }

    /// Area of the illuminated disc [mm²].
    pub fn active_area_total(&self) -> f64 {
        std::f64::consts::PI * self.radius() * self.radius()
    }

    /// Per-segment junction areas [mm²].
    pub fn junction_areas(&self) -> Vec<f64> {
        match &self.junction_area_override {
            Some(a) => a.clone(),
            None => vec![self.active_area_total() / self.n_segments as f64; self.n_segments],
        }
    }

    /// `(Σ 1/A_i)^-1`: the single area with the same series capacitance as the string.
    pub fn capacitance_equivalent_area(&self) -> f64 {
        1.0 / self.junction_areas().iter().map(|a| 1.0 / a).sum::<f64>()
    }

    /// `Σ 1/A_i` [mm⁻²].
    pub fn inverse_area_sum(&self) -> f64 {
        self.junction_areas().iter().map(|a| 1.0 / a).sum()
    }
}
