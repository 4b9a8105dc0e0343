use std::f64::consts::PI;

use super::{DiodeParams, SegmentGeometry};

/// Series combination `(Σ 1/C_i)^-1`.
pub fn series_capacitance(caps: &[f64]) -> f64 {
    1.0 / caps.iter().map(|c| 1.0 / c).sum::<f64>()
}

/// Junction capacitance of the series string [F].
pub fn string_capacitance(geometry: &SegmentGeometry, diode: &DiodeParams) -> f64 {
    let caps: Vec<f64> = geometry
        .junction_areas()
        .iter()
        .map(|a| diode.junction_capacitance_density * a)
        .collect();
    series_capacitance(&caps)
}

/// First-order RC corner `1/(2π(R_L + R_eff)C)` [Hz].
pub fn small_signal_bandwidth(c_string: f64, load_resistance: f64, effective_series_resistance: f64) -> f64 {
    1.0 / (2.0 * PI * (load_resistance + effective_series_resistance) * c_string)
}
