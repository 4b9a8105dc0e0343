use serde::{Deserialize, Serialize};

use super::diode::segment_slope;
use super::{check_positive, segment_voltage, string_capacitance, small_signal_bandwidth, DeviceError, DiodeParams, SegmentGeometry};
use crate::numeric::brent;

/// What a reverse-biased (shadowed) segment does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReverseModel {
    /// Shunt conduction down to `voltage`, then a hard clamp.
    Breakdown { voltage: f64 },
    /// No clamp: with an ideal shunt, currents above `Iph + I0` are unreachable.
    Blocking,
}

impl Default for ReverseModel {
    fn default() -> Self {
        ReverseModel::Breakdown { voltage: -6.0 }
    }
}

impl ReverseModel {
    fn clamp(self) -> Option<f64> {
        match self {
            ReverseModel::Breakdown { voltage } => Some(voltage),
            ReverseModel::Blocking => None,
        }
    }
}

/// An n-segment series-connected converter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentedDevice {
    pub name: String,
    pub geometry: SegmentGeometry,
    pub diode: DiodeParams,
    #[serde(default)]
    pub reverse: ReverseModel,
    /// Specific resistance of the lateral conduction path [Ω·mm²]; the
    /// small-signal series resistance is this times `Σ 1/A_i`.
    pub lateral_resistivity: f64,
}

impl SegmentedDevice {
    pub fn validate(&self) -> Result<(), DeviceError> {
        self.geometry.validate()?;
        self.diode.validate()?;
        if let ReverseModel::Breakdown { voltage } = self.reverse {
            if !(voltage < 0.0) {
                return Err(DeviceError::InvalidParameter {
                    name: "reverse.voltage",
                    value: voltage,
                    reason: "breakdown voltage must be negative",
                });
            }
        }
        if !(self.lateral_resistivity >= 0.0 && self.lateral_resistivity.is_finite()) {
            return Err(DeviceError::InvalidParameter {
                name: "lateral_resistivity",
                value: self.lateral_resistivity,
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    /// Small-signal series resistance of the string [Ω].
    pub fn effective_series_resistance(&self) -> f64 {
        self.lateral_resistivity * self.geometry.inverse_area_sum()
    }

    /// Series junction capacitance [F].
    pub fn capacitance(&self) -> f64 {
        string_capacitance(&self.geometry, &self.diode)
    }

    /// Electrical −3 dB frequency into `load_resistance` [Hz].
    pub fn bandwidth(&self, load_resistance: f64) -> f64 {
        small_signal_bandwidth(self.capacitance(), load_resistance, self.effective_series_resistance())
    }

    pub fn model(&self, photocurrents: &[f64]) -> Result<StringModel, DeviceError> {
        StringModel::new(self, photocurrents)
    }
}

/// Continuous string characteristic `V(I) = Σ V_i(I)` for fixed photocurrents.
#[derive(Debug, Clone, PartialEq)]
pub struct StringModel {
    pub diode: DiodeParams,
    pub areas: Vec<f64>,
    pub photocurrents: Vec<f64>,
    pub breakdown: Option<f64>,
}

impl StringModel {
    pub fn new(device: &SegmentedDevice, photocurrents: &[f64]) -> Result<Self, DeviceError> {
        device.validate()?;
        let areas = device.geometry.junction_areas();
        if photocurrents.len() != areas.len() {
            return Err(DeviceError::PhotocurrentCount { expected: areas.len(), got: photocurrents.len() });
        }
        for &i in photocurrents {
            if !(i >= 0.0 && i.is_finite()) {
                return Err(DeviceError::InvalidParameter {
                    name: "photocurrent",
                    value: i,
                    reason: "must be finite and >= 0",
                });
            }
        }
        Ok(Self {
            diode: device.diode.clone(),
            areas,
            photocurrents: photocurrents.to_vec(),
            breakdown: device.reverse.clamp(),
        })
    }

    /// String voltage and whether any segment sits on the breakdown clamp.
    pub fn voltage(&self, current: f64) -> Result<(f64, bool), DeviceError> {
        let mut v = 0.0;
        let mut clamped = false;
        for (&a, &iph) in self.areas.iter().zip(&self.photocurrents) {
            let s = segment_voltage(&self.diode, a, iph, current, self.breakdown)?;
            v += s.voltage;
            clamped |= s.clamped;
        }
        Ok((v, clamped))
    }

    pub fn power(&self, current: f64) -> Result<f64, DeviceError> {
        Ok(current * self.voltage(current)?.0)
    }

    /// `dV/dI` of the string.
    pub fn slope(&self, current: f64) -> Result<f64, DeviceError> {
        let mut s = 0.0;
        for (&a, &iph) in self.areas.iter().zip(&self.photocurrents) {
            s += segment_slope(&self.diode, a, iph, current, self.breakdown)?;
        }
        Ok(s)
    }

    fn blocks(&self) -> bool {
        self.breakdown.is_none() && self.diode.shunt_resistance_per_segment.is_infinite()
    }

    /// Largest representable current the string can carry, if bounded.
    pub fn current_limit(&self) -> Option<f64> {
        if !self.blocks() {
            return None;
        }
        self.areas
            .iter()
            .zip(&self.photocurrents)
            .map(|(&a, &iph)| {
                let i0 = self.diode.saturation_current(a);
                let mut f = iph + i0;
                while (iph - f) / i0 <= -1.0 {
                    f = f.next_down();
                }
                f
            })
            .reduce(f64::min)
    }

    /// Current where the string voltage crosses zero.
    pub fn short_circuit_current(&self) -> Result<f64, DeviceError> {
        let imax = self.photocurrents.iter().cloned().fold(0.0, f64::max);
        if imax == 0.0 {
            return Ok(0.0);
        }
        let v = |i: f64| self.voltage(i).map(|x| x.0);
        let hi = match self.current_limit() {
            Some(lim) => {
                if v(lim)? > 0.0 {
                    return Ok(lim);
                }
                lim
            }
            None => {
                let mut hi = imax;
                let mut tries = 0;
                while v(hi)? > 0.0 {
                    hi *= 2.0;
                    tries += 1;
                    if tries > 60 {
                        return Err(DeviceError::NoBracket { lo: 0.0, hi });
                    }
                }
                hi
            }
        };
        let mut err = None;
        let root = brent(
            |i| match v(i) {
                Ok(x) => x,
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            },
            0.0,
            hi,
            1e-18,
            4.0 * f64::EPSILON,
            300,
        )
        .map_err(|_| DeviceError::NoBracket { lo: 0.0, hi })?;
        match err {
            Some(e) => Err(e),
            None => Ok(root),
        }
    }
}

/// One sampled point of a characteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvPoint {
    pub voltage: f64,
    pub current: f64,
    /// A segment voltage was clamped at reverse breakdown.
    pub clamped: bool,
}

/// Sampled I-V characteristic, ordered by strictly increasing voltage.
///
/// Curves built by [`string_iv`] keep the continuous model for refinement;
/// curves read from files carry points only.
#[derive(Debug, Clone, PartialEq)]
pub struct IvCurve {
    pub points: Vec<IvPoint>,
    pub device_id: String,
    pub illumination_id: String,
    pub model: Option<StringModel>,
}

impl IvCurve {
    /// Builds a model-free curve, sorting by voltage.
    pub fn from_points(mut points: Vec<IvPoint>) -> Result<Self, DeviceError> {
        if points.len() < 2 {
            return Err(DeviceError::TooFewPoints { got: points.len(), need: 2 });
        }
        if points.iter().any(|p| !(p.voltage.is_finite() && p.current.is_finite())) {
            return Err(DeviceError::InvalidParameter { name: "point", value: f64::NAN, reason: "must be finite" });
        }
        points.sort_by(|a, b| a.voltage.total_cmp(&b.voltage));
        if points.windows(2).any(|w| w[1].voltage <= w[0].voltage) {
            return Err(DeviceError::Unordered);
        }
        Ok(Self { points, device_id: String::new(), illumination_id: String::new(), model: None })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Short-circuit current, from the model when present, otherwise by
    /// linear interpolation of the `V = 0` crossing.
    pub fn short_circuit_current(&self) -> Result<f64, DeviceError> {
        if let Some(m) = &self.model {
            return m.short_circuit_current();
        }
        interpolate_at_voltage(&self.points, 0.0).ok_or(DeviceError::ZeroShortCircuit)
    }

    /// Open-circuit voltage (the `I = 0` crossing).
    pub fn open_circuit_voltage(&self) -> Option<f64> {
        if let Some(m) = &self.model {
            return m.voltage(0.0).ok().map(|v| v.0);
        }
        self.points.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            if (a.current >= 0.0) && (b.current <= 0.0) && a.current != b.current {
                Some(a.voltage + (b.voltage - a.voltage) * a.current / (a.current - b.current))
            } else if a.current == 0.0 {
                Some(a.voltage)
            } else {
                None
            }
        })
    }

    pub fn any_clamped(&self) -> bool {
        self.points.iter().any(|p| p.clamped)
    }
}

fn interpolate_at_voltage(points: &[IvPoint], v: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        (a.voltage <= v && v <= b.voltage)
            .then(|| a.current + (b.current - a.current) * (v - a.voltage) / (b.voltage - a.voltage))
    })
}

/// Samples the string characteristic on `current_grid`.
pub fn string_iv(device: &SegmentedDevice, photocurrents: &[f64], current_grid: &[f64]) -> Result<IvCurve, DeviceError> {
    let model = StringModel::new(device, photocurrents)?;
    let mut points = Vec::with_capacity(current_grid.len());
    for &i in current_grid {
        if !i.is_finite() {
            return Err(DeviceError::InvalidParameter { name: "current_grid", value: i, reason: "must be finite" });
        }
        let (v, clamped) = model.voltage(i)?;
        points.push(IvPoint { voltage: v, current: i, clamped });
    }
    points.sort_by(|a, b| a.voltage.total_cmp(&b.voltage).then(b.current.total_cmp(&a.current)));
    points.dedup_by(|b, a| b.voltage == a.voltage);
    if points.len() < 2 {
        return Err(DeviceError::TooFewPoints { got: points.len(), need: 2 });
    }
    Ok(IvCurve { points, device_id: device.name.clone(), illumination_id: String::new(), model: Some(model) })
}

/// Current grid of `n_points` from open circuit to beyond short circuit,
/// uniformly spaced with logarithmic refinement approaching `I_sc`.
pub fn default_current_grid(model: &StringModel, n_points: usize) -> Result<Vec<f64>, DeviceError> {
    check_positive("n_points", n_points as f64)?;
    let isc = model.short_circuit_current()?;
    if isc == 0.0 {
        return Ok((0..n_points).map(|k| 1e-9 * k as f64 / (n_points - 1).max(1) as f64).collect());
    }
    let top = match model.current_limit() {
        Some(lim) => lim,
        None => {
            let imax = model.photocurrents.iter().cloned().fold(0.0, f64::max);
            imax.max(isc * 1.02)
        }
    };
    let n_uniform = n_points / 2;
    let n_log = n_points / 4;
    let n_tail = n_points - n_uniform - n_log - 1;
    let mut grid: Vec<f64> = Vec::with_capacity(n_points);
    grid.extend((0..n_uniform).map(|k| isc * k as f64 / n_uniform as f64));
    grid.extend((0..n_log).map(|k| {
        let u = 1.0 + 11.0 * k as f64 / (n_log.max(2) - 1) as f64;
        isc * (1.0 - 10f64.powf(-u))
    }));
    grid.push(isc);
    grid.extend((1..=n_tail).map(|k| isc + (top - isc) * k as f64 / n_tail as f64));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}
