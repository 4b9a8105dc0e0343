use super::LinkError;
use crate::device::{
    default_current_grid, find_mpp, segment_photocurrents, string_iv, IlluminationProfile, SegmentedDevice,
};

/// Beam offset of `r` mm along +x, the edge shared by sectors `n−1` and 0.
pub fn edge_offset(r: f64) -> [f64; 2] {
    [r, 0.0]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchRow {
    pub offset: f64,
    pub imp_isc: Option<f64>,
    pub pmp: f64,
    pub isc: f64,
}

/// Imp/Isc and Pmp as the beam walks off centre along [`edge_offset`].
pub fn mismatch_study(
    device: &SegmentedDevice,
    beam: &IlluminationProfile,
    offsets: &[f64],
) -> Result<Vec<MismatchRow>, LinkError> {
    device.validate()?;
    offsets
        .iter()
        .map(|&r| {
            let b = IlluminationProfile { center_offset: edge_offset(r), ..beam.clone() };
            let iph = segment_photocurrents(&device.geometry, &b)?;
            let model = device.model(&iph)?;
            let curve = string_iv(device, &iph, &default_current_grid(&model, 2048)?)?;
            let mpp = find_mpp(&curve)?;
            let isc = model.short_circuit_current()?;
            Ok(MismatchRow {
                offset: r,
                imp_isc: (isc > 0.0).then(|| mpp.point.current / isc),
                pmp: mpp.point.power,
                isc,
            })
        })
        .collect()
}
