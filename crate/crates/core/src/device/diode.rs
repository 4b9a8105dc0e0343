use serde::{Deserialize, Serialize};

use super::{check_positive, DeviceError};
use crate::numeric::{brent, BOLTZMANN, ELEMENTARY_CHARGE};

/// Single-diode parameters of one segment.
///
/// `I = Iph − I0·(exp((V + I·Rs)/(n·VT)) − 1) − (V + I·Rs)/Rsh`, with
/// `I0 = saturation_current_density × junction area`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiodeParams {
    /// [A/mm²]
    pub saturation_current_density: f64,
    pub ideality_factor: f64,
    /// [Ω]; zero is allowed.
    pub series_resistance_per_segment: f64,
    /// [Ω]; `inf` disables shunt conduction.
    pub shunt_resistance_per_segment: f64,
    /// [F/mm²]
    pub junction_capacitance_density: f64,
    /// [K]
    pub temperature: f64,
}

impl Default for DiodeParams {
    fn default() -> Self {
        Self {
            saturation_current_density: 1e-19,
            ideality_factor: 1.2,
            series_resistance_per_segment: 1.0,
            shunt_resistance_per_segment: 1e5,
            junction_capacitance_density: 0.1358e-12,
            temperature: 298.15,
        }
    }
}

impl DiodeParams {
    pub fn validate(&self) -> Result<(), DeviceError> {
        check_positive("saturation_current_density", self.saturation_current_density)?;
        check_positive("junction_capacitance_density", self.junction_capacitance_density)?;
        check_positive("temperature", self.temperature)?;
        if !(1.0..=2.5).contains(&self.ideality_factor) {
            return Err(DeviceError::InvalidParameter {
                name: "ideality_factor",
                value: self.ideality_factor,
                reason: "must lie in [1, 2.5]",
            });
        }
        let rs = self.series_resistance_per_segment;
        if !(rs >= 0.0 && rs.is_finite()) {
            return Err(DeviceError::InvalidParameter {
                name: "series_resistance_per_segment",
                value: rs,
                reason: "must be finite and >= 0",
            });
        }
        if !(self.shunt_resistance_per_segment > 0.0) {
            return Err(DeviceError::InvalidParameter {
                name: "shunt_resistance_per_segment",
                value: self.shunt_resistance_per_segment,
                reason: "must be > 0 (inf allowed)",
            });
        }
        Ok(())
    }

    /// `kT/q` [V].
    pub fn thermal_voltage(&self) -> f64 {
        BOLTZMANN * self.temperature / ELEMENTARY_CHARGE
    }

    /// `n·kT/q` [V].
    pub fn slope_voltage(&self) -> f64 {
        self.ideality_factor * self.thermal_voltage()
    }

    pub fn saturation_current(&self, area: f64) -> f64 {
        self.saturation_current_density * area
    }

    /// Junction current `J(x)` flowing out for junction voltage `x = V + I·Rs`.
    fn junction_current(&self, i0: f64, iph: f64, x: f64) -> f64 {
        let shunt = if self.shunt_resistance_per_segment.is_infinite() {
            0.0
        } else {
            x / self.shunt_resistance_per_segment
        };
        iph - i0 * (x / self.slope_voltage()).exp_m1() - shunt
    }
}

/// Segment terminal voltage at a prescribed current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentVoltage {
    pub voltage: f64,
    /// Voltage hit the reverse-breakdown limit and was clamped.
    pub clamped: bool,
}

/// Terminal current of a segment held at `voltage`.
///
/// The implicit equation is rewritten in the junction voltage `x`, where
/// `k(x) = x − V − Rs·J(x)` is strictly increasing; `[V, V + Rs·J(V)]`
/// (ordered) always brackets the root.
pub fn segment_iv(diode: &DiodeParams, area: f64, photocurrent: f64, voltage: f64) -> Result<f64, DeviceError> {
    let i0 = diode.saturation_current(area);
    let rs = diode.series_resistance_per_segment;
    let j_v = diode.junction_current(i0, photocurrent, voltage);
    if rs == 0.0 {
        return if j_v.is_finite() { Ok(j_v) } else { Err(DeviceError::NoBracket { lo: voltage, hi: voltage }) };
    }
    let other = voltage + rs * j_v;
    let (lo, hi) = if other < voltage { (other, voltage) } else { (voltage, other) };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(DeviceError::NoBracket { lo, hi });
    }
    if lo == hi {
        return Ok(j_v);
    }
    let k = |x: f64| x - voltage - rs * diode.junction_current(i0, photocurrent, x);
    let x = brent(k, lo, hi, 1e-15, 4.0 * f64::EPSILON, 200).map_err(|_| DeviceError::NoBracket { lo, hi })?;
    Ok((x - voltage) / rs)
}

/// Junction voltage that carries `current`, or `None` if the diode cannot
/// reach it (ideal shunt and `current ≥ Iph + I0`).
fn junction_voltage(diode: &DiodeParams, i0: f64, photocurrent: f64, current: f64) -> Result<Option<f64>, DeviceError> {
    let nvt = diode.slope_voltage();
    let excess = photocurrent - current;
    let ideal_x = if excess / i0 > -1.0 { Some(nvt * (excess / i0).ln_1p()) } else { None };
    let rsh = diode.shunt_resistance_per_segment;
    if rsh.is_infinite() {
        return Ok(ideal_x);
    }
    let (lo, hi) = if excess > 0.0 {
        (0.0, ideal_x.unwrap_or(0.0))
    } else {
        // g(excess·Rsh) is only I0-sized; widen so rounding cannot flip its sign
        (excess * rsh * (1.0 + 1e-6), 0.0)
    };
    if lo == hi {
        return Ok(Some(lo));
    }
    let g = |x: f64| diode.junction_current(i0, photocurrent, x) - current;
    brent(g, lo, hi, 1e-15, 4.0 * f64::EPSILON, 200)
        .map(Some)
        .map_err(|_| DeviceError::NoBracket { lo, hi })
}

/// Inverse of [`segment_iv`]: terminal voltage at a given segment current.
///
/// With `breakdown = Some(vbd)` the voltage is clamped at `vbd` (and
/// unreachable currents resolve to the clamp); with `None` an unreachable
/// current is an error.
pub fn segment_voltage(
    diode: &DiodeParams,
    area: f64,
    photocurrent: f64,
    current: f64,
    breakdown: Option<f64>,
) -> Result<SegmentVoltage, DeviceError> {
    let i0 = diode.saturation_current(area);
    let v = junction_voltage(diode, i0, photocurrent, current)?
        .map(|x| x - current * diode.series_resistance_per_segment);
    match (v, breakdown) {
        (Some(v), Some(vbd)) if v < vbd => Ok(SegmentVoltage { voltage: vbd, clamped: true }),
        (Some(v), _) => Ok(SegmentVoltage { voltage: v, clamped: false }),
        (None, Some(vbd)) => Ok(SegmentVoltage { voltage: vbd, clamped: true }),
        (None, None) => Err(DeviceError::Infeasible { current }),
    }
}

/// `dV/dI` of one segment at `current`; zero on the clamp.
pub(crate) fn segment_slope(
    diode: &DiodeParams,
    area: f64,
    photocurrent: f64,
    current: f64,
    breakdown: Option<f64>,
) -> Result<f64, DeviceError> {
    let i0 = diode.saturation_current(area);
    let sv = segment_voltage(diode, area, photocurrent, current, breakdown)?;
    if sv.clamped {
        return Ok(0.0);
    }
    let x = sv.voltage + current * diode.series_resistance_per_segment;
    let nvt = diode.slope_voltage();
    let g = i0 / nvt * (x / nvt).exp() + 1.0 / diode.shunt_resistance_per_segment;
    Ok(-1.0 / g - diode.series_resistance_per_segment)
}
