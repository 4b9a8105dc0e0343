use super::{check_positive, DeviceError, IvCurve, IvPoint, StringModel};
use crate::numeric::{brent, golden_max};

/// A (V, I, P) point with `P = V·I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub voltage: f64,
    pub current: f64,
    pub power: f64,
}

impl OperatingPoint {
    pub fn new(voltage: f64, current: f64) -> Self {
        Self { voltage, current, power: voltage * current }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mpp {
    pub point: OperatingPoint,
    /// Sampled power had more than one local maximum; the global grid
    /// maximum was refined instead of trusting the neighbourhood.
    pub fallback: bool,
}

const MIN_POINTS: usize = 8;

/// Maximum power point of a sampled characteristic.
pub fn find_mpp(curve: &IvCurve) -> Result<Mpp, DeviceError> {
    let pts = &curve.points;
    if pts.len() < MIN_POINTS {
        return Err(DeviceError::TooFewPoints { got: pts.len(), need: MIN_POINTS });
    }
    let quadrant: Vec<usize> = (0..pts.len()).filter(|&j| pts[j].voltage >= 0.0 && pts[j].current >= 0.0).collect();
    let power = |p: &IvPoint| p.voltage * p.current;
    let best = quadrant.iter().copied().max_by(|&a, &b| power(&pts[a]).total_cmp(&power(&pts[b])));
    let Some(k) = best.filter(|&k| power(&pts[k]) > 0.0) else {
        let isc = curve.short_circuit_current().unwrap_or(0.0).max(0.0);
        return Ok(Mpp { point: OperatingPoint { voltage: 0.0, current: isc, power: 0.0 }, fallback: false });
    };

    let fallback = local_maxima(quadrant.iter().map(|&j| power(&pts[j]))) > 1;
    if fallback {
        log::warn!("sampled power of `{}` is not unimodal; refining the global grid maximum", curve.device_id);
    }

    let grid_best = OperatingPoint::new(pts[k].voltage, pts[k].current);
    let lo_idx = k.saturating_sub(1);
    let hi_idx = (k + 1).min(pts.len() - 1);
    let refined = match &curve.model {
        Some(m) => refine_on_model(m, pts[hi_idx].current.max(0.0), pts[lo_idx].current)?,
        None => refine_linear(&pts[lo_idx..=hi_idx]),
    };
    let point = if refined.power >= grid_best.power { refined } else { grid_best };
    Ok(Mpp { point, fallback })
}

fn local_maxima(p: impl Iterator<Item = f64>) -> usize {
    let v: Vec<f64> = p.collect();
    let mut count = 0;
    let mut j = 0;
    while j < v.len() {
        // collapse plateaus so flat tops count once
        let mut e = j;
        while e + 1 < v.len() && v[e + 1] == v[j] {
            e += 1;
        }
        let left = j == 0 || v[j - 1] < v[j];
        let right = e + 1 == v.len() || v[e + 1] < v[j];
        if left && right && v[j] > 0.0 {
            count += 1;
        }
        j = e + 1;
    }
    count
}

fn refine_on_model(model: &StringModel, lo: f64, hi: f64) -> Result<OperatingPoint, DeviceError> {
    let mut err = None;
    let mut p = |i: f64| match model.power(i) {
        Ok(x) => x,
        Err(e) => {
            err = Some(e);
            f64::NEG_INFINITY
        }
    };
    let (mut i_best, p_best) = golden_max(&mut p, lo, hi, 1e-14 * hi.abs().max(1e-30), 300);
    if let Some(e) = err {
        return Err(e);
    }
    // polish on dP/dI = V + I·dV/dI where the bracket straddles the root
    let dp = |i: f64| -> f64 {
        match (model.voltage(i), model.slope(i)) {
            (Ok((v, _)), Ok(s)) => v + i * s,
            _ => f64::NAN,
        }
    };
    let h = 1e-6 * (hi - lo);
    let (a, b) = ((i_best - h).max(lo), (i_best + h).min(hi));
    if let Ok(root) = brent(dp, a, b, 1e-18, 4.0 * f64::EPSILON, 200) {
        if model.power(root)? > p_best {
            i_best = root;
        }
    }
    let (v, _) = model.voltage(i_best)?;
    Ok(OperatingPoint::new(v, i_best))
}

/// Exact maximum of `V·I` on a piecewise-linear interpolant.
fn refine_linear(pts: &[IvPoint]) -> OperatingPoint {
    let mut best = OperatingPoint::new(pts[0].voltage, pts[0].current);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        for p in [a, b] {
            let op = OperatingPoint::new(p.voltage, p.current);
            if op.power > best.power {
                best = op;
            }
        }
        let slope = (b.current - a.current) / (b.voltage - a.voltage);
        if slope < 0.0 {
            let intercept = a.current - slope * a.voltage;
            let v = -intercept / (2.0 * slope);
            if v > a.voltage && v < b.voltage {
                let op = OperatingPoint::new(v, intercept + slope * v);
                if op.power > best.power {
                    best = op;
                }
            }
        }
    }
    best
}

/// `I_mp / I_sc`.
pub fn imp_isc_ratio(curve: &IvCurve) -> Result<f64, DeviceError> {
    let isc = curve.short_circuit_current()?;
    if !(isc > 0.0) {
        return Err(DeviceError::ZeroShortCircuit);
    }
    let mpp = find_mpp(curve)?;
    Ok((mpp.point.current / isc).min(1.0))
}

/// Power conversion efficiency against `incident_power` [W].
pub fn pce(mpp: &OperatingPoint, incident_power: f64) -> Result<f64, DeviceError> {
    check_positive("incident_power", incident_power)?;
    Ok(mpp.power / incident_power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{default_current_grid, string_iv, DiodeParams, ReverseModel, SegmentGeometry, SegmentedDevice};

    fn device(n: usize) -> SegmentedDevice {
        SegmentedDevice {
            name: "t".into(),
            geometry: SegmentGeometry::new(1.5, n).unwrap(),
            diode: DiodeParams::default(),
            reverse: ReverseModel::default(),
            lateral_resistivity: 0.0,
        }
    }

    #[test]
    fn dark_curve_has_zero_mpp() {
        let d = device(2);
        let m = d.model(&[0.0, 0.0]).unwrap();
        let c = string_iv(&d, &[0.0, 0.0], &default_current_grid(&m, 64).unwrap()).unwrap();
        let mpp = find_mpp(&c).unwrap();
        assert_eq!(mpp.point.power, 0.0);
        assert_eq!(mpp.point.voltage, 0.0);
    }

    #[test]
    fn mpp_dominates_grid() {
        let d = device(4);
        let iph = [4e-4, 3.5e-4, 3.9e-4, 4.1e-4];
        let m = d.model(&iph).unwrap();
        let c = string_iv(&d, &iph, &default_current_grid(&m, 256).unwrap()).unwrap();
        let mpp = find_mpp(&c).unwrap();
        assert!(!mpp.fallback);
        assert!(c.points.iter().all(|p| p.voltage * p.current <= mpp.point.power));
        assert_eq!(mpp.point.power, mpp.point.voltage * mpp.point.current);
    }

    #[test]
    fn matched_string_keeps_single_segment_ratio() {
        let one = device(1);
        let four = device(4);
        let r1 = {
            let m = one.model(&[4e-4]).unwrap();
            imp_isc_ratio(&string_iv(&one, &[4e-4], &default_current_grid(&m, 512).unwrap()).unwrap()).unwrap()
        };
        let four = SegmentedDevice {
            geometry: four.geometry.with_junction_area(one.geometry.junction_areas()[0]).unwrap(),
            ..four
        };
        let m = four.model(&[4e-4; 4]).unwrap();
        let r4 = imp_isc_ratio(&string_iv(&four, &[4e-4; 4], &default_current_grid(&m, 512).unwrap()).unwrap()).unwrap();
        assert!((r1 - r4).abs() < 1e-7, "{r1} vs {r4}");
    }

    #[test]
    fn linear_refinement_on_sampled_curve() {
        // I = 1 − V on [0, 1]: maximum 0.25 at V = 0.5, grid avoids it
        let pts = (0..9)
            .map(|k| {
                let v = k as f64 / 8.0 + 0.03;
                IvPoint { voltage: v, current: 1.0 - v, clamped: false }
            })
            .collect();
        let c = IvCurve::from_points(pts).unwrap();
        let mpp = find_mpp(&c).unwrap();
        assert!((mpp.point.power - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pce_arithmetic() {
        assert_eq!(pce(&OperatingPoint::new(0.0, 1e-3), 2.3e-3).unwrap(), 0.0);
        let p = pce(&OperatingPoint::new(0.89, 1e-3), 2.3e-3).unwrap();
        assert!((p - 0.386_956_5).abs() < 1e-6);
        let p = pce(&OperatingPoint::new(0.23, 1e-3), 2.3e-3).unwrap();
        assert!((p - 0.1).abs() < 1e-12);
        assert!(pce(&OperatingPoint::new(1.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn non_unimodal_flagged() {
        let currents = [1.0, 0.9, 0.2, 0.35, 0.3, 0.2, 0.1, 0.05, 0.0];
        let pts = currents
            .iter()
            .enumerate()
            .map(|(k, &i)| IvPoint { voltage: k as f64 * 0.1, current: i, clamped: false })
            .collect();
        let mpp = find_mpp(&IvCurve::from_points(pts).unwrap()).unwrap();
        assert!(mpp.fallback);
    }
}
