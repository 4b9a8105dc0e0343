use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{edge_offset, LinkError};
use crate::device::{
    default_current_grid, find_mpp, segment_photocurrents, string_iv, DiodeParams, IlluminationProfile, ReverseModel,
    SegmentGeometry, SegmentedDevice,
};
use crate::numeric::brent;

/// Calibration refuses to return parameters whose residual exceeds this.
pub const MAX_RESIDUAL: f64 = 0.25;

const MIN_BANDWIDTH_TARGETS: usize = 3;
/// Capacitance density, lateral resistivity, responsivity and one offset.
const FREE_PARAMETERS: usize = 4;
const MAX_FIXED_POINT: usize = 20;
const OFFSET_STEP: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthTarget {
    pub label: String,
    /// `Σ 1/A_i` over the junction areas [1/mm²].
    pub inverse_area_sum: f64,
    /// [Hz]
    pub bandwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthFit {
    /// [F/mm²]
    pub capacitance_density: f64,
    /// [Ω·mm²]
    pub lateral_resistivity: f64,
    /// `(model − target)/target` per target.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Model `f3 = S/(2π c (R_L + ρ S))` with `S = Σ 1/A_i`, i.e. `1/f3 = a/S + b`.
fn model_bandwidth(a: f64, b: f64, s: f64) -> f64 {
    1.0 / (a / s + b)
}

/// Any point of `{(a, b) ≥ 0 : lo_i ≤ a x_i + b ≤ hi_i}`, found among the
/// vertices of the constraint arrangement.
fn feasible_vertex(x: &[f64], lo: &[f64], hi: &[f64]) -> Option<(f64, f64)> {
    // Lines are (p, q, r) meaning p·a + q·b = r.
    let mut lines = vec![(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)];
    for i in 0..x.len() {
        lines.push((x[i], 1.0, lo[i]));
        lines.push((x[i], 1.0, hi[i]));
    }
    let scale = hi.iter().cloned().fold(0.0, f64::max);
    let slack = 1e-12 * scale;
    let inside = |a: f64, b: f64| {
        a >= -slack
            && b >= -slack
            && x.iter().zip(lo.iter().zip(hi)).all(|(&xi, (&l, &h))| {
                let v = a * xi + b;
                v >= l - slack && v <= h + slack
            })
    };
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (p1, q1, r1) = lines[i];
            let (p2, q2, r2) = lines[j];
            let det = p1 * q2 - p2 * q1;
            if det.abs() < 1e-300 {
                continue;
            }
            let a = (r1 * q2 - r2 * q1) / det;
            let b = (p1 * r2 - p2 * r1) / det;
            if inside(a, b) {
                return Some((a.max(0.0), b.max(0.0)));
            }
        }
    }
    None
}

/// Fits capacitance density and lateral resistivity to measured bandwidths,
/// minimising the largest relative error.
pub fn fit_bandwidth(targets: &[BandwidthTarget], load_resistance: f64) -> Result<BandwidthFit, LinkError> {
    if targets.len() < MIN_BANDWIDTH_TARGETS {
        return Err(LinkError::UnderDetermined { targets: targets.len(), params: 2 });
    }
    super::check_positive("load_resistance", load_resistance)?;
    for t in targets {
        super::check_positive("bandwidth", t.bandwidth)?;
        super::check_positive("inverse_area_sum", t.inverse_area_sum)?;
    }
    let x: Vec<f64> = targets.iter().map(|t| 1.0 / t.inverse_area_sum).collect();
    let bounds = |t: f64| -> (Vec<f64>, Vec<f64>) {
        let lo = targets.iter().map(|g| 1.0 / ((1.0 + t) * g.bandwidth)).collect();
        let hi = targets.iter().map(|g| 1.0 / ((1.0 - t) * g.bandwidth)).collect();
        (lo, hi)
    };
    let (mut t_lo, mut t_hi) = (0.0, 0.99);
    let (lo, hi) = bounds(t_hi);
    let mut sol = feasible_vertex(&x, &lo, &hi).ok_or(LinkError::NoConvergence { what: "bandwidth fit" })?;
    let (lo, hi) = bounds(0.0);
    if let Some(s) = feasible_vertex(&x, &lo, &hi) {
        sol = s;
        t_hi = 0.0;
    }
    for _ in 0..200 {
        if t_hi - t_lo <= 1e-15 {
            break;
        }
        let t = 0.5 * (t_lo + t_hi);
        let (lo, hi) = bounds(t);
        match feasible_vertex(&x, &lo, &hi) {
            Some(s) => {
                sol = s;
                t_hi = t;
            }
            None => t_lo = t,
        }
    }
    let (a, b) = sol;
    if !(a > 0.0) {
        return Err(LinkError::NoConvergence { what: "bandwidth fit" });
    }
    let residuals: Vec<f64> =
        targets.iter().map(|g| model_bandwidth(a, b, g.inverse_area_sum) / g.bandwidth - 1.0).collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(BandwidthFit {
        capacitance_density: a / (2.0 * PI * load_resistance),
        lateral_resistivity: b * load_resistance / a,
        residuals,
        max_residual,
    })
}

/// Measured values for one device configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigTarget {
    pub label: String,
    pub geometry: SegmentGeometry,
    /// [Hz]
    pub bandwidth: Option<f64>,
    /// [W]
    pub pmp: Option<f64>,
    pub imp_isc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationTargets {
    /// Starting diode parameters; saturation current, ideality and
    /// resistances are kept, the capacitance density is fitted.
    pub diode: DiodeParams,
    #[serde(default)]
    pub reverse: ReverseModel,
    /// Operating beam; its offset is ignored and its responsivity is fitted.
    pub beam: IlluminationProfile,
    pub load_resistance: f64,
    /// Configuration whose Pmp fixes the responsivity.
    pub responsivity_reference: String,
    pub configs: Vec<ConfigTarget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedConfig {
    pub label: String,
    /// Beam offset along [`edge_offset`] [mm].
    pub offset: f64,
    /// `false` when the target Imp/Isc lies above the aligned value, so
    /// the offset stays at zero.
    pub offset_reachable: bool,
    pub bandwidth: f64,
    pub bandwidth_target: Option<f64>,
    pub pmp: f64,
    pub pmp_target: Option<f64>,
    pub imp_isc: f64,
    pub imp_isc_target: Option<f64>,
}

impl CalibratedConfig {
    pub fn bandwidth_residual(&self) -> Option<f64> {
        self.bandwidth_target.map(|t| self.bandwidth / t - 1.0)
    }

    pub fn pmp_residual(&self) -> Option<f64> {
        self.pmp_target.map(|t| self.pmp / t - 1.0)
    }

    pub fn imp_isc_residual(&self) -> Option<f64> {
        self.imp_isc_target.map(|t| self.imp_isc / t - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub capacitance_density: f64,
    pub lateral_resistivity: f64,
    pub responsivity: f64,
    pub load_resistance: f64,
    pub bandwidth_fit: BandwidthFit,
    pub configs: Vec<CalibratedConfig>,
    pub iterations: usize,
}

impl CalibrationResult {
    pub fn config(&self, label: &str) -> Option<&CalibratedConfig> {
        self.configs.iter().find(|c| c.label == label)
    }

    /// Largest absolute bandwidth and Pmp residual.
    pub fn max_residual(&self) -> f64 {
        self.configs
            .iter()
            .flat_map(|c| [c.bandwidth_residual(), c.pmp_residual()])
            .flatten()
            .fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Diode parameters with the fitted capacitance density.
    pub fn diode(&self, base: &DiodeParams) -> DiodeParams {
        DiodeParams { junction_capacitance_density: self.capacitance_density, ..base.clone() }
    }
}

struct Evaluator<'a> {
    targets: &'a CalibrationTargets,
    diode: DiodeParams,
    lateral_resistivity: f64,
}

impl Evaluator<'_> {
    fn device(&self, cfg: &ConfigTarget) -> SegmentedDevice {
        SegmentedDevice {
            name: cfg.label.clone(),
            geometry: cfg.geometry.clone(),
            diode: self.diode.clone(),
            reverse: self.targets.reverse,
            lateral_resistivity: self.lateral_resistivity,
        }
    }

    /// (Pmp, Imp/Isc) with the beam shifted by `offset` along the sector edge.
    fn dc(&self, cfg: &ConfigTarget, responsivity: f64, offset: f64) -> Result<(f64, f64), LinkError> {
        let device = self.device(cfg);
        let beam = IlluminationProfile {
            responsivity,
            center_offset: edge_offset(offset),
            ..self.targets.beam.clone()
        };
        let iph = segment_photocurrents(&device.geometry, &beam)?;
        let model = device.model(&iph)?;
        let curve = string_iv(&device, &iph, &default_current_grid(&model, 2048)?)?;
        let mpp = find_mpp(&curve)?;
        let isc = model.short_circuit_current()?;
        let ratio = if isc > 0.0 { mpp.point.current / isc } else { 0.0 };
        Ok((mpp.point.power, ratio))
    }

    fn offset(&self, cfg: &ConfigTarget, responsivity: f64, target: f64) -> Result<(f64, bool), LinkError> {
        let ratio = |r: f64| self.dc(cfg, responsivity, r).map(|x| x.1 - target);
        if ratio(0.0)? <= 0.0 {
            return Ok((0.0, false));
        }
        let limit = cfg.geometry.radius() + 2.0 * self.targets.beam.beam_radius_1e2;
        let mut lo = 0.0;
        let mut hi = OFFSET_STEP;
        while ratio(hi)? > 0.0 {
            lo = hi;
            hi += OFFSET_STEP;
            if hi > limit {
                return Ok((lo, false));
            }
        }
        let mut err = None;
        let r = brent(
            |r| match ratio(r) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            },
            lo,
            hi,
            1e-9,
            4.0 * f64::EPSILON,
            200,
        )
        .map_err(|_| LinkError::NoConvergence { what: "beam offset" })?;
        match err {
            Some(e) => Err(e),
            None => Ok((r, true)),
        }
    }

    fn responsivity(&self, cfg: &ConfigTarget, offset: f64, pmp: f64) -> Result<f64, LinkError> {
        let mut err = None;
        let r = brent(
            |resp| match self.dc(cfg, resp, offset) {
                Ok((p, _)) => p - pmp,
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            },
            1e-3,
            2.0,
            1e-13,
            4.0 * f64::EPSILON,
            200,
        )
        .map_err(|_| LinkError::NoConvergence { what: "responsivity" })?;
        match err {
            Some(e) => Err(e),
            None => Ok(r),
        }
    }
}

/// Fits capacitance density and lateral resistivity to the bandwidths,
/// per-configuration beam offsets to Imp/Isc, and the responsivity to the
/// reference configuration's Pmp.
pub fn calibrate(targets: &CalibrationTargets) -> Result<CalibrationResult, LinkError> {
    targets.diode.validate()?;
    targets.beam.validate()?;
    let bw_targets: Vec<BandwidthTarget> = targets
        .configs
        .iter()
        .filter_map(|c| {
            c.bandwidth.map(|b| BandwidthTarget {
                label: c.label.clone(),
                inverse_area_sum: c.geometry.inverse_area_sum(),
                bandwidth: b,
            })
        })
        .collect();
    if bw_targets.len() < MIN_BANDWIDTH_TARGETS {
        return Err(LinkError::UnderDetermined { targets: bw_targets.len(), params: FREE_PARAMETERS });
    }
    let fit = fit_bandwidth(&bw_targets, targets.load_resistance)?;
    for (t, &r) in bw_targets.iter().zip(&fit.residuals) {
        if r.abs() > MAX_RESIDUAL {
            return Err(LinkError::Residual { label: t.label.clone(), residual: r, limit: MAX_RESIDUAL });
        }
    }
    let eval = Evaluator {
        targets,
        diode: DiodeParams { junction_capacitance_density: fit.capacitance_density, ..targets.diode.clone() },
        lateral_resistivity: fit.lateral_resistivity,
    };
    let reference = targets
        .configs
        .iter()
        .find(|c| c.label == targets.responsivity_reference)
        .ok_or_else(|| LinkError::MissingTarget(targets.responsivity_reference.clone()))?;
    let ref_pmp = reference.pmp.ok_or_else(|| LinkError::MissingTarget(format!("{} pmp", reference.label)))?;

    let mut responsivity = targets.beam.responsivity;
    let mut offsets = vec![(0.0, false); targets.configs.len()];
    let mut iterations = 0;
    loop {
        iterations += 1;
        for (o, c) in offsets.iter_mut().zip(&targets.configs) {
            if let Some(t) = c.imp_isc {
                *o = eval.offset(c, responsivity, t)?;
            }
        }
        let k = targets.configs.iter().position(|c| c.label == reference.label).expect("reference present");
        let next = eval.responsivity(reference, offsets[k].0, ref_pmp)?;
        let done = (next - responsivity).abs() <= 1e-10 * next;
        responsivity = next;
        if done {
            break;
        }
        if iterations >= MAX_FIXED_POINT {
            return Err(LinkError::NoConvergence { what: "offset/responsivity iteration" });
        }
    }

    let mut configs = Vec::with_capacity(targets.configs.len());
    for (c, &(offset, reachable)) in targets.configs.iter().zip(&offsets) {
        let (pmp, imp_isc) = eval.dc(c, responsivity, offset)?;
        let device = eval.device(c);
        configs.push(CalibratedConfig {
            label: c.label.clone(),
            offset,
            offset_reachable: reachable,
            bandwidth: device.bandwidth(targets.load_resistance),
            bandwidth_target: c.bandwidth,
            pmp,
            pmp_target: c.pmp,
            imp_isc,
            imp_isc_target: c.imp_isc,
        });
    }
    for c in &configs {
        if let Some(r) = c.pmp_residual() {
            if r.abs() > MAX_RESIDUAL {
                return Err(LinkError::Residual { label: c.label.clone(), residual: r, limit: MAX_RESIDUAL });
            }
        }
    }
    Ok(CalibrationResult {
        capacitance_density: fit.capacitance_density,
        lateral_resistivity: fit.lateral_resistivity,
        responsivity,
        load_resistance: targets.load_resistance,
        bandwidth_fit: fit,
        configs,
        iterations,
    })
}
