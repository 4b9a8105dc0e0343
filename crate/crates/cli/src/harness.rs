//! Executes an [`ExperimentSpec`] against a preset library.
//!
//! `report.csv` columns, in order:
//!
//! `label, preset, n_segments, segment_area_mm2, load_resistance_ohm,
//! offset_mm, seed, f3db_hz, snr_bandwidth_hz, data_rate_bps, ber,
//! payload_bits, loaded_bits, active_carriers, pmp_w, pce_emitted,
//! pce_incident, imp_isc, harvest_voltage_v, harvest_current_a,
//! harvest_power_w, incident_power_w, tx_clip_fraction, sync_psr_db, error`
//!
//! Empty cells mean "not computed"; a row with a non-empty `error` is a
//! failed run.

use std::fs;
use std::path::{Path, PathBuf};

use slipt_core::device::{default_current_grid, find_mpp, segment_photocurrents, string_iv, SegmentGeometry, SegmentedDevice};
use slipt_core::formats::{format_f64, write_iv_csv, write_plan_csv};
use slipt_core::link::{calibrate, mismatch_study, sweep, CalibrationResult, LinkReport, LinkScenario};
use slipt_core::modem::OfdmConfig;
use slipt_core::presets::PresetLibrary;
use slipt_core::safety::{assess, SafetyReport, SafetyScenario};

use crate::artifact::{opt, ArtifactSink, Provenance, Table};
use crate::plot::{emit_plot_data, PlotInput, PlotKind};
use crate::spec::{ExperimentKind, ExperimentSpec, SweepEntry};
use crate::HarnessError;

pub const CALIBRATION_FILE: &str = "calibration.toml";

pub const REPORT_HEADER: [&str; 25] = [
    "label",
    "preset",
    "n_segments",
    "segment_area_mm2",
    "load_resistance_ohm",
    "offset_mm",
    "seed",
    "f3db_hz",
    "snr_bandwidth_hz",
    "data_rate_bps",
    "ber",
    "payload_bits",
    "loaded_bits",
    "active_carriers",
    "pmp_w",
    "pce_emitted",
    "pce_incident",
    "imp_isc",
    "harvest_voltage_v",
    "harvest_current_a",
    "harvest_power_w",
    "incident_power_w",
    "tx_clip_fraction",
    "sync_psr_db",
    "error",
];

pub const SAFETY_HEADER: [&str; 14] = [
    "wavelength_nm",
    "source_diameter_mm",
    "evaluation_distance_mm",
    "exposure_time_s",
    "received_power_w",
    "pupil_radius_mm",
    "angular_subtense_mrad",
    "source_class",
    "c4",
    "c6",
    "mpe_w_m2",
    "irradiance_w_m2",
    "margin",
    "verdict",
];

pub const TABLE1_HEADER: [&str; 20] = [
    "config",
    "cell_diameter_mm",
    "n_segments",
    "segment_area_measured_mm2",
    "segment_area_sim_mm2",
    "segment_area_residual",
    "pmp_measured_w",
    "pmp_sim_w",
    "pmp_residual",
    "imp_isc_measured",
    "imp_isc_sim",
    "imp_isc_residual",
    "pce_measured",
    "pce_sim",
    "pce_residual",
    "bandwidth_measured_hz",
    "bandwidth_sim_hz",
    "bandwidth_residual",
    "offset_mm",
    "offset_reachable",
];

/// Where a run reads from and writes to.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub library: PresetLibrary,
    pub out_dir: PathBuf,
    /// Overrides the spec's calibration path.
    pub calibration: Option<PathBuf>,
}

impl RunContext {
    pub fn new(library: PresetLibrary, out_dir: impl Into<PathBuf>) -> Self {
        Self { library, out_dir: out_dir.into(), calibration: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    /// One entry per failed sub-run, `label: error`.
    pub failures: Vec<String>,
    /// Human-readable summary lines.
    pub messages: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        u8::from(!self.failures.is_empty())
    }
}

pub fn load_calibration(path: &Path) -> Result<CalibrationResult, HarnessError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(HarnessError::MissingCalibration(path.to_path_buf()))
        }
        Err(e) => return Err(HarnessError::io(path, e)),
    };
    parse_calibration(&text).map_err(|reason| HarnessError::BadCalibration { path: path.to_path_buf(), reason })
}

/// Parses a calibration artifact; the header comment is ignored.
pub fn parse_calibration(text: &str) -> Result<CalibrationResult, String> {
    let cal: CalibrationResult = toml::from_str(text).map_err(|e| e.to_string().trim_end().to_string())?;
    let finite = [cal.capacitance_density, cal.lateral_resistivity, cal.responsivity, cal.load_resistance];
    if finite.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err("fitted parameters must be finite and > 0".into());
    }
    if cal.configs.iter().any(|c| !c.offset.is_finite()) {
        return Err("beam offsets must be finite".into());
    }
    Ok(cal)
}

pub fn calibration_toml(cal: &CalibrationResult) -> String {
    toml::to_string(cal).expect("calibration serialises")
}

fn default_presets(kind: ExperimentKind, lib: &PresetLibrary) -> Vec<String> {
    let all = || lib.devices.iter().map(|d| d.name.clone()).collect();
    let measured = || lib.devices.iter().filter(|d| d.measured.is_some()).map(|d| d.name.clone()).collect();
    match kind {
        ExperimentKind::Iv | ExperimentKind::BandwidthSweep => all(),
        ExperimentKind::Mismatch => vec!["L6".into()],
        ExperimentKind::ReproduceFig3 => vec!["L2".into(), "L4".into(), "L6".into()],
        ExperimentKind::ReproduceTable1 | ExperimentKind::ReproduceFig6 => measured(),
        ExperimentKind::Link | ExperimentKind::Safety | ExperimentKind::Calibrate => Vec::new(),
    }
}

/// Runs `spec`; `spec_text` is what gets hashed into the artifact headers.
pub fn run(spec: &ExperimentSpec, spec_text: &str, ctx: &RunContext) -> Result<RunOutcome, HarnessError> {
    spec.validate()?;
    let lib = &ctx.library;
    let presets = if spec.presets.is_empty() { default_presets(spec.kind, lib) } else { spec.presets.clone() };
    for name in presets.iter().chain(spec.sweep.iter().map(|e| &e.preset)) {
        lib.preset(name)?;
    }
    let needs_cal = spec.kind.needs_calibration() || spec.calibrated || spec.link.calibrated_offsets;
    let cal = if needs_cal {
        let path = ctx
            .calibration
            .clone()
            .or_else(|| spec.calibration.clone())
            .unwrap_or_else(|| ctx.out_dir.join(CALIBRATION_FILE));
        Some(load_calibration(&path)?)
    } else {
        None
    };
    let mut sink = ArtifactSink::new(&ctx.out_dir, Provenance::new(spec_text, spec.seed));
    let mut outcome = RunOutcome::default();
    let cal = cal.as_ref();
    match spec.kind {
        ExperimentKind::Iv => run_iv(spec, lib, cal, &presets, &mut sink, &mut outcome)?,
        ExperimentKind::BandwidthSweep => run_bandwidth(spec, lib, cal, &presets, &mut sink)?,
        ExperimentKind::Link => {
            let entries: Vec<SweepEntry> = if spec.sweep.is_empty() {
                presets.iter().map(|p| SweepEntry { preset: p.clone(), label: None, load_resistance: None, offset: None }).collect()
            } else {
                spec.sweep.clone()
            };
            let runs = run_entries(spec, lib, cal, &entries, spec.link.calibrated_offsets)?;
            write_link_runs(&runs, "", &mut sink, &mut outcome, true)?;
        }
        ExperimentKind::Mismatch => run_mismatch(spec, lib, cal, &presets, &mut sink)?,
        ExperimentKind::Safety => {
            let scenario = spec.safety.expect("validated");
            let (table, line) = safety_artifact(&scenario)?;
            sink.table("safety.csv", table)?;
            outcome.messages.push(line);
        }
        ExperimentKind::Calibrate => {
            let cal = calibrate(&lib.calibration_targets()?)?;
            sink.write(CALIBRATION_FILE, calibration_toml(&cal).as_bytes())?;
            sink.table("calibration.csv", calibration_table(&cal))?;
            outcome.messages.push(format!(
                "capacitance density {} F/mm², lateral resistivity {} Ω·mm², responsivity {} A/W, max residual {:.3}",
                sig4(cal.capacitance_density),
                sig4(cal.lateral_resistivity),
                sig4(cal.responsivity),
                cal.max_residual()
            ));
        }
        ExperimentKind::ReproduceTable1 => {
            let cal = cal.expect("loaded above");
            sink.table("table1.csv", table1(lib, cal, &presets)?)?;
        }
        ExperimentKind::ReproduceFig6 => {
            let entries: Vec<SweepEntry> = presets
                .iter()
                .map(|p| SweepEntry { preset: p.clone(), label: None, load_resistance: None, offset: None })
                .collect();
            let aligned = run_entries(spec, lib, cal, &entries, false)?;
            let offset_entries: Vec<SweepEntry> = entries
                .iter()
                .map(|e| SweepEntry { label: Some(format!("{}-offset", e.preset)), ..e.clone() })
                .collect();
            let offset = run_entries(spec, lib, cal, &offset_entries, true)?;
            for (runs, prefix) in [(&aligned, "fig6_aligned"), (&offset, "fig6_offset")] {
                let inputs = plot_inputs(runs);
                for s in emit_plot_data(&inputs, PlotKind::Fig6) {
                    sink.table(s.file_name(prefix), s.table())?;
                }
            }
            let mut measured = Table::new(&["segment_area_mm2", "data_rate_bps"]);
            for p in &presets {
                let d = lib.preset(p)?;
                if let Some(m) = d.measured {
                    measured.row([format_f64(mean_area(&d.geometry()?)), format_f64(m.data_rate)]);
                }
            }
            sink.table("fig6_measured.csv", measured)?;
            let all: Vec<LinkRun> = aligned.into_iter().chain(offset).collect();
            write_link_runs(&all, "fig6_", &mut sink, &mut outcome, false)?;
        }
        ExperimentKind::ReproduceFig3 => {
            let entries: Vec<SweepEntry> = presets
                .iter()
                .map(|p| SweepEntry { preset: p.clone(), label: None, load_resistance: None, offset: None })
                .collect();
            let runs = run_entries(spec, lib, cal, &entries, false)?;
            for s in emit_plot_data(&plot_inputs(&runs), PlotKind::Fig3) {
                sink.table(s.file_name("fig3"), s.table())?;
            }
            write_link_runs(&runs, "fig3_", &mut sink, &mut outcome, false)?;
        }
    }
    outcome.artifacts = sink.written().to_vec();
    Ok(outcome)
}

/// One link configuration and its result.
struct LinkRun {
    label: String,
    preset: String,
    geometry: SegmentGeometry,
    offset: f64,
    modem: OfdmConfig,
    result: Result<LinkReport, String>,
}

fn mean_area(g: &SegmentGeometry) -> f64 {
    let a = g.junction_areas();
    a.iter().sum::<f64>() / a.len() as f64
}

fn run_entries(
    spec: &ExperimentSpec,
    lib: &PresetLibrary,
    cal: Option<&CalibrationResult>,
    entries: &[SweepEntry],
    calibrated_offsets: bool,
) -> Result<Vec<LinkRun>, HarnessError> {
    let mut scenarios = Vec::with_capacity(entries.len());
    let mut meta = Vec::with_capacity(entries.len());
    for e in entries {
        let offset = match (e.offset, calibrated_offsets, cal) {
            (Some(o), _, _) => o,
            (None, true, Some(c)) => c.config(&e.preset).map_or(0.0, |k| k.offset),
            _ => 0.0,
        };
        let mut rx = lib.receiver(&e.preset, offset, cal)?;
        if let Some(r) = e.load_resistance {
            rx.load_resistance = r;
        }
        if let Some(s) = spec.link.psd_scale {
            rx.noise.psd_scale = s;
        }
        meta.push((e.label().to_string(), e.preset.clone(), rx.device.geometry.clone(), offset));
        scenarios.push(LinkScenario {
            label: e.label().to_string(),
            tx: lib.transmitter.clone(),
            rx,
            modem: lib.modem.clone(),
            options: spec.link.options(),
            seed: spec.seed,
        });
    }
    Ok(sweep(&scenarios)
        .into_iter()
        .zip(meta)
        .map(|(r, (label, preset, geometry, offset))| LinkRun {
            label,
            preset,
            geometry,
            offset,
            modem: lib.modem.clone(),
            result: r.map_err(|e| e.to_string()),
        })
        .collect())
}

fn plot_inputs(runs: &[LinkRun]) -> Vec<PlotInput<'_>> {
    runs.iter()
        .filter_map(|r| {
            r.result.as_ref().ok().map(|rep| PlotInput { label: &r.label, segment_area: mean_area(&r.geometry), report: rep })
        })
        .collect()
}

fn report_row(run: &LinkRun) -> Vec<String> {
    let mut row = vec![
        run.label.clone(),
        run.preset.clone(),
        run.geometry.n_segments.to_string(),
        format_f64(mean_area(&run.geometry)),
    ];
    match &run.result {
        Ok(r) => {
            row.extend([
                format_f64(r.load_resistance),
                format_f64(run.offset),
                r.seed.to_string(),
                format_f64(r.f3db),
                opt(r.snr_bandwidth),
                format_f64(r.data_rate),
                format_f64(r.ber),
                r.payload_bits.to_string(),
                r.plan.total_bits().to_string(),
                r.plan.active_carriers().to_string(),
                format_f64(r.pmp),
                format_f64(r.pce_emitted),
                format_f64(r.pce_incident),
                opt(r.imp_isc),
                format_f64(r.harvest.voltage),
                format_f64(r.harvest.current),
                format_f64(r.harvest.power),
                format_f64(r.incident_power),
                format_f64(r.tx_clip_fraction),
                format_f64(r.sync_psr_db),
                String::new(),
            ]);
        }
        Err(e) => {
            row.extend(std::iter::repeat_n(String::new(), REPORT_HEADER.len() - row.len() - 1));
            row[5] = format_f64(run.offset);
            row.push(e.clone());
        }
    }
    row
}

fn write_link_runs(
    runs: &[LinkRun],
    prefix: &str,
    sink: &mut ArtifactSink,
    outcome: &mut RunOutcome,
    per_run_dirs: bool,
) -> Result<(), HarnessError> {
    let mut report = Table::new(&REPORT_HEADER);
    for run in runs {
        report.row(report_row(run));
        match &run.result {
            Ok(r) => {
                if per_run_dirs {
                    sink.table(Path::new(&run.label).join("snr_profile.csv"), snr_table(r, &run.modem))?;
                    let mut plan = Vec::new();
                    write_plan_csv(&r.plan, &mut plan)?;
                    sink.write(Path::new(&run.label).join("loading.csv"), &plan)?;
                }
                outcome.messages.push(format!(
                    "{}: {} Gbit/s at BER {:.2e}, f3dB {} GHz",
                    run.label,
                    sig4(r.data_rate / 1e9),
                    r.ber,
                    sig4(r.f3db / 1e9)
                ));
            }
            Err(e) => outcome.failures.push(format!("{}: {e}", run.label)),
        }
    }
    sink.table(format!("{prefix}report.csv"), report)?;
    Ok(())
}

fn snr_table(r: &LinkReport, modem: &OfdmConfig) -> Table {
    let mut t = Table::new(&["carrier", "frequency_hz", "snr_db"]);
    for (k, (&s, &o)) in r.snr.snr_linear.iter().zip(&r.snr.omitted).enumerate() {
        let db = if o || s <= 0.0 { String::new() } else { format_f64(10.0 * s.log10()) };
        t.row([k.to_string(), format_f64(modem.carrier_frequency(k)), db]);
    }
    t
}

fn beam_device(
    lib: &PresetLibrary,
    cal: Option<&CalibrationResult>,
    name: &str,
    offset: f64,
) -> Result<(SegmentedDevice, Vec<f64>), HarnessError> {
    let rx = lib.receiver(name, offset, cal)?;
    let iph = segment_photocurrents(&rx.device.geometry, &rx.incident_beam())?;
    Ok((rx.device, iph))
}

fn run_iv(
    spec: &ExperimentSpec,
    lib: &PresetLibrary,
    cal: Option<&CalibrationResult>,
    presets: &[String],
    sink: &mut ArtifactSink,
    outcome: &mut RunOutcome,
) -> Result<(), HarnessError> {
    let mut summary = Table::new(&[
        "preset",
        "n_segments",
        "offset_mm",
        "isc_a",
        "voc_v",
        "imp_a",
        "vmp_v",
        "pmp_w",
        "imp_isc",
        "pce_emitted",
        "clamped",
    ]);
    let emitted = lib.transmitter.emitted_power();
    for name in presets {
        let (device, iph) = beam_device(lib, cal, name, spec.iv.offset)?;
        let model = device.model(&iph)?;
        let curve = string_iv(&device, &iph, &default_current_grid(&model, spec.iv.points)?)?;
        let mpp = find_mpp(&curve)?;
        let isc = model.short_circuit_current()?;
        let voc = model.voltage(0.0)?.0;
        let mut csv = Vec::new();
        write_iv_csv(&curve, &mut csv)?;
        sink.write(format!("iv_{name}.csv"), &csv)?;
        summary.row([
            name.clone(),
            device.geometry.n_segments.to_string(),
            format_f64(spec.iv.offset),
            format_f64(isc),
            format_f64(voc),
            format_f64(mpp.point.current),
            format_f64(mpp.point.voltage),
            format_f64(mpp.point.power),
            if isc > 0.0 { format_f64(mpp.point.current / isc) } else { String::new() },
            format_f64(mpp.point.power / emitted),
            curve.any_clamped().to_string(),
        ]);
        outcome.messages.push(format!("{name}: Pmp {} mW", sig4(mpp.point.power * 1e3)));
    }
    sink.table("iv_summary.csv", summary)?;
    Ok(())
}

fn run_bandwidth(
    spec: &ExperimentSpec,
    lib: &PresetLibrary,
    cal: Option<&CalibrationResult>,
    presets: &[String],
    sink: &mut ArtifactSink,
) -> Result<(), HarnessError> {
    let mut t = Table::new(&[
        "preset",
        "cell_diameter_mm",
        "n_segments",
        "segment_area_mm2",
        "load_resistance_ohm",
        "capacitance_f",
        "series_resistance_ohm",
        "f3db_hz",
    ]);
    let default_load = cal.map_or(lib.receiver.load_resistance, |c| c.load_resistance);
    let loads = if spec.bandwidth.load_resistances.is_empty() {
        vec![default_load]
    } else {
        spec.bandwidth.load_resistances.clone()
    };
    for name in presets {
        let base = lib.device(name, cal)?;
        let variants: Vec<SegmentedDevice> = if spec.bandwidth.segments.is_empty() {
            vec![base]
        } else {
            spec.bandwidth
                .segments
                .iter()
                .map(|&n| {
                    let geometry = SegmentGeometry::new(base.geometry.cell_diameter, n)?;
                    Ok(SegmentedDevice { geometry, ..base.clone() })
                })
                .collect::<Result<_, HarnessError>>()?
        };
        for d in &variants {
            d.validate()?;
            for &rl in &loads {
                t.row([
                    name.clone(),
                    format_f64(d.geometry.cell_diameter),
                    d.geometry.n_segments.to_string(),
                    format_f64(mean_area(&d.geometry)),
                    format_f64(rl),
                    format_f64(d.capacitance()),
                    format_f64(d.effective_series_resistance()),
                    format_f64(d.bandwidth(rl)),
                ]);
            }
        }
    }
    sink.table("bandwidth.csv", t)?;
    Ok(())
}

fn run_mismatch(
    spec: &ExperimentSpec,
    lib: &PresetLibrary,
    cal: Option<&CalibrationResult>,
    presets: &[String],
    sink: &mut ArtifactSink,
) -> Result<(), HarnessError> {
    let offsets = spec.mismatch.offsets();
    for name in presets {
        let rx = lib.receiver(name, 0.0, cal)?;
        let rows = mismatch_study(&rx.device, &rx.incident_beam(), &offsets)?;
        let mut t = Table::new(&["offset_mm", "imp_isc", "pmp_w", "isc_a", "pmp_relative"]);
        let p0 = rows.first().map(|r| r.pmp).unwrap_or(0.0);
        for r in &rows {
            t.row([
                format_f64(r.offset),
                opt(r.imp_isc),
                format_f64(r.pmp),
                format_f64(r.isc),
                if p0 > 0.0 { format_f64(r.pmp / p0) } else { String::new() },
            ]);
        }
        sink.table(format!("mismatch_{name}.csv"), t)?;
    }
    Ok(())
}

/// Four significant figures for display.
pub fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    if !(1e-3..1e6).contains(&v.abs()) {
        return format!("{v:.3e}");
    }
    let digits = 3 - v.abs().log10().floor() as i32;
    if digits >= 0 {
        format!("{v:.*}", digits as usize)
    } else {
        let scale = 10f64.powi(-digits);
        format!("{:.0}", (v / scale).round() * scale)
    }
}

pub fn safety_line(s: &SafetyScenario, r: &SafetyReport) -> String {
    format!(
        "verdict: {} (margin {}x; MPE {} W/m², pupil irradiance {} W/m², subtense {} mrad, {} source, {} nm for {} s)",
        r.verdict,
        sig4(r.margin),
        sig4(r.mpe),
        sig4(r.irradiance),
        sig4(r.angular_subtense * 1e3),
        r.class,
        sig4(s.wavelength),
        sig4(s.exposure_time),
    )
}

/// Single-row CSV and the verdict line.
pub fn safety_artifact(s: &SafetyScenario) -> Result<(Table, String), HarnessError> {
    let r = assess(s)?;
    let mut t = Table::new(&SAFETY_HEADER);
    t.row([
        format_f64(s.wavelength),
        format_f64(s.source_diameter),
        format_f64(s.evaluation_distance),
        format_f64(s.exposure_time),
        format_f64(s.received_power_at_pupil),
        format_f64(s.pupil_radius),
        format_f64(r.angular_subtense * 1e3),
        r.class.to_string(),
        format_f64(r.c4),
        format_f64(r.c6),
        format_f64(r.mpe),
        format_f64(r.irradiance),
        format_f64(r.margin),
        r.verdict.to_string(),
    ]);
    Ok((t, safety_line(s, &r)))
}

fn calibration_table(cal: &CalibrationResult) -> Table {
    let mut t = Table::new(&[
        "label",
        "offset_mm",
        "offset_reachable",
        "bandwidth_hz",
        "bandwidth_target_hz",
        "bandwidth_residual",
        "pmp_w",
        "pmp_target_w",
        "pmp_residual",
        "imp_isc",
        "imp_isc_target",
        "imp_isc_residual",
    ]);
    for c in &cal.configs {
        t.row([
            c.label.clone(),
            format_f64(c.offset),
            c.offset_reachable.to_string(),
            format_f64(c.bandwidth),
            opt(c.bandwidth_target),
            opt(c.bandwidth_residual()),
            format_f64(c.pmp),
            opt(c.pmp_target),
            opt(c.pmp_residual()),
            format_f64(c.imp_isc),
            opt(c.imp_isc_target),
            opt(c.imp_isc_residual()),
        ]);
    }
    t
}

fn residual(sim: f64, measured: f64) -> String {
    format_f64((sim - measured) / measured)
}

/// Simulated Table 1 next to the reference values, using each
/// configuration's calibrated beam offset.
pub fn table1(lib: &PresetLibrary, cal: &CalibrationResult, presets: &[String]) -> Result<Table, HarnessError> {
    let mut t = Table::new(&TABLE1_HEADER);
    let emitted = lib.transmitter.emitted_power();
    for name in presets {
        let preset = lib.preset(name)?;
        let Some(m) = preset.measured else {
            continue;
        };
        let c = cal.config(name).ok_or_else(|| HarnessError::BadCalibration {
            path: PathBuf::from(CALIBRATION_FILE),
            reason: format!("no entry for {name}; recalibrate with the current presets"),
        })?;
        let rx = lib.receiver(name, c.offset, Some(cal))?;
        let dc = rx.dc_state()?;
        let reference_area = preset.junction_area.unwrap_or_else(|| mean_area(&rx.device.geometry));
        let sim_area = mean_area(&rx.device.geometry);
        let pmp = dc.mpp.point.power;
        let imp_isc = dc.imp_isc().unwrap_or(0.0);
        let pce = pmp / emitted;
        let f3 = rx.bandwidth();
        t.row([
            name.clone(),
            format_f64(preset.cell_diameter),
            preset.n_segments.to_string(),
            format_f64(reference_area),
            format_f64(sim_area),
            residual(sim_area, reference_area),
            format_f64(m.pmp),
            format_f64(pmp),
            residual(pmp, m.pmp),
            format_f64(m.imp_isc),
            format_f64(imp_isc),
            residual(imp_isc, m.imp_isc),
            format_f64(m.pce),
            format_f64(pce),
            residual(pce, m.pce),
            format_f64(m.bandwidth),
            format_f64(f3),
            residual(f3, m.bandwidth),
            format_f64(c.offset),
            c.offset_reachable.to_string(),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_significant_figures() {
        assert_eq!(sig4(181.9207), "181.9");
        assert_eq!(sig4(87.4966), "87.50");
        assert_eq!(sig4(2.07886), "2.079");
        assert_eq!(sig4(0.00123456), "0.001235");
        assert_eq!(sig4(123456.0), "123500");
        assert_eq!(sig4(1.3579e-13), "1.358e-13");
    }

    #[test]
    fn calibration_artifact_round_trips() {
        let lib = PresetLibrary::builtin();
        let cal = calibrate(&lib.calibration_targets().unwrap()).unwrap();
        let text = format!("# slipt spec_sha256=00 seed=1\n{}", calibration_toml(&cal));
        assert_eq!(parse_calibration(&text).unwrap(), cal);
    }

    #[test]
    fn missing_calibration_is_instructive() {
        let e = load_calibration(Path::new("/nonexistent/calibration.toml")).unwrap_err();
        assert!(matches!(e, HarnessError::MissingCalibration(_)));
        assert!(e.to_string().contains("slipt calibrate"));
        assert_eq!(e.exit_code(), 1);
    }
}
