//! Plain-text and raw interchange formats.
//!
//! | data       | layout                                   |
//! |------------|------------------------------------------|
//! | I-V curve  | CSV `voltage_V,current_A`                |
//! | sample run | CSV `index,value` or raw little-endian f64 |
//! | loading    | CSV `carrier,bits,power_scale`           |
//!
//! Readers skip lines starting with `#`, so artifacts carrying a provenance
//! header read back unchanged. Floats are written in shortest round-trip
//! form.

use std::io::{Read, Write};

use thiserror::Error;

use crate::device::{DeviceError, IvCurve, IvPoint};
use crate::modem::BitLoadingPlan;

pub const IV_HEADER: [&str; 2] = ["voltage_V", "current_A"];
pub const FRAME_HEADER: [&str; 2] = ["index", "value"];
pub const PLAN_HEADER: [&str; 3] = ["carrier", "bits", "power_scale"];
/// Largest per-carrier load a plan file may carry (1024-QAM).
pub const MAX_PLAN_BITS: u32 = 10;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: {reason}")]
    Row { line: u64, reason: String },
    #[error("raw stream length {0} is not a multiple of 8 bytes")]
    RawLength(usize),
    #[error("raw sample {index} is not finite")]
    RawValue { index: usize },
    #[error(transparent)]
    Device(#[from] DeviceError),
}

/// Shortest representation that parses back to the same bits.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), FormatError> {
    let found = rdr.headers()?.clone();
    if found.iter().ne(expected.iter().copied()) {
        return Err(FormatError::Header { expected: expected.join(","), found: found.iter().collect::<Vec<_>>().join(",") });
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T, FormatError> {
    let line = rec.position().map_or(0, |p| p.line());
    let raw = rec.get(i).ok_or_else(|| FormatError::Row { line, reason: format!("missing `{name}`") })?;
    raw.parse().map_err(|_| FormatError::Row { line, reason: format!("`{name}` = {raw:?} does not parse") })
}

fn finite(v: f64, rec: &csv::StringRecord, name: &str) -> Result<f64, FormatError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FormatError::Row { line: rec.position().map_or(0, |p| p.line()), reason: format!("`{name}` is not finite") })
    }
}

pub fn write_iv_csv<W: Write>(curve: &IvCurve, w: W) -> Result<(), FormatError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(IV_HEADER)?;
    for p in &curve.points {
        wtr.write_record([format_f64(p.voltage), format_f64(p.current)])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_iv_csv<R: Read>(r: R) -> Result<IvCurve, FormatError> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &IV_HEADER)?;
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let voltage = finite(field(&rec, 0, "voltage_V")?, &rec, "voltage_V")?;
        let current = finite(field(&rec, 1, "current_A")?, &rec, "current_A")?;
        points.push(IvPoint { voltage, current, clamped: false });
    }
    Ok(IvCurve::from_points(points)?)
}

pub fn write_frame_csv<W: Write>(samples: &[f64], w: W) -> Result<(), FormatError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FRAME_HEADER)?;
    for (i, &v) in samples.iter().enumerate() {
        wtr.write_record([i.to_string(), format_f64(v)])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Indices must run 0, 1, 2, ... without gaps.
pub fn read_frame_csv<R: Read>(r: R) -> Result<Vec<f64>, FormatError> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &FRAME_HEADER)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let index: usize = field(&rec, 0, "index")?;
        if index != out.len() {
            return Err(FormatError::Row {
                line: rec.position().map_or(0, |p| p.line()),
                reason: format!("index {index}, expected {}", out.len()),
            });
        }
        out.push(finite(field(&rec, 1, "value")?, &rec, "value")?);
    }
    Ok(out)
}

pub fn write_frame_raw<W: Write>(samples: &[f64], mut w: W) -> Result<(), FormatError> {
    for v in samples {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_frame_raw(bytes: &[u8]) -> Result<Vec<f64>, FormatError> {
    if bytes.len() % 8 != 0 {
        return Err(FormatError::RawLength(bytes.len()));
    }
    bytes
        .chunks_exact(8)
        .enumerate()
        .map(|(index, c)| {
            let v = f64::from_le_bytes(c.try_into().expect("chunk of 8"));
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FormatError::RawValue { index })
            }
        })
        .collect()
}

pub fn write_plan_csv<W: Write>(plan: &BitLoadingPlan, w: W) -> Result<(), FormatError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(PLAN_HEADER)?;
    for (k, (&b, &p)) in plan.bits_per_subcarrier.iter().zip(&plan.power_scale_per_subcarrier).enumerate() {
        wtr.write_record([k.to_string(), b.to_string(), format_f64(p)])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Carriers must be consecutive from 0; unloaded carriers carry no power.
pub fn read_plan_csv<R: Read>(r: R) -> Result<BitLoadingPlan, FormatError> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &PLAN_HEADER)?;
    let mut plan = BitLoadingPlan::zeros(0);
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let carrier: usize = field(&rec, 0, "carrier")?;
        if carrier != plan.len() {
            return Err(FormatError::Row { line, reason: format!("carrier {carrier}, expected {}", plan.len()) });
        }
        let bits: u32 = field(&rec, 1, "bits")?;
        let scale = finite(field(&rec, 2, "power_scale")?, &rec, "power_scale")?;
        if bits > MAX_PLAN_BITS {
            return Err(FormatError::Row { line, reason: format!("{bits} bits exceeds {MAX_PLAN_BITS}") });
        }
        if scale < 0.0 || (bits == 0 && scale != 0.0) {
            return Err(FormatError::Row { line, reason: format!("power_scale {scale} invalid for {bits} bits") });
        }
        plan.bits_per_subcarrier.push(bits);
        plan.power_scale_per_subcarrier.push(scale);
    }
    Ok(plan)
}
