//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so seeds keep exercising the parsers on a plain `cargo test`.

use std::fs;
use std::path::PathBuf;

use slipt_cli::harness::{calibration_toml, parse_calibration};
use slipt_cli::ExperimentSpec;
use slipt_core::formats::*;
use slipt_core::presets::PresetLibrary;

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "empty corpus for {target}");
    seeds
}

/// Runs `check` on every seed and returns how many were accepted.
fn replay(target: &str, check: impl Fn(&[u8]) -> bool) -> usize {
    corpus(target).iter().filter(|(_, data)| check(data)).count()
}

fn same<T: std::fmt::Debug>(a: &T, b: &T) {
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn iv_csv() {
    let ok = replay("read_iv_csv", |d| {
        let Ok(c) = read_iv_csv(d) else { return false };
        let mut out = Vec::new();
        write_iv_csv(&c, &mut out).unwrap();
        same(&c, &read_iv_csv(out.as_slice()).unwrap());
        true
    });
    assert!(ok >= 2);
}

#[test]
fn frame_csv() {
    let ok = replay("read_frame_csv", |d| {
        let Ok(s) = read_frame_csv(d) else { return false };
        let mut out = Vec::new();
        write_frame_csv(&s, &mut out).unwrap();
        same(&s, &read_frame_csv(out.as_slice()).unwrap());
        true
    });
    assert_eq!(ok, 1);
}

#[test]
fn frame_raw() {
    let ok = replay("read_frame_raw", |d| {
        let Ok(s) = read_frame_raw(d) else { return false };
        let mut out = Vec::new();
        write_frame_raw(&s, &mut out).unwrap();
        assert_eq!(out, d);
        true
    });
    assert_eq!(ok, 1);
}

#[test]
fn plan_csv() {
    let ok = replay("read_plan_csv", |d| {
        let Ok(p) = read_plan_csv(d) else { return false };
        let mut out = Vec::new();
        write_plan_csv(&p, &mut out).unwrap();
        same(&p, &read_plan_csv(out.as_slice()).unwrap());
        true
    });
    assert_eq!(ok, 1);
}

#[test]
fn preset_library() {
    let ok = replay("preset_library", |d| {
        let Ok(lib) = PresetLibrary::from_toml(&String::from_utf8_lossy(d)) else { return false };
        lib.devices.iter().all(|p| p.geometry().is_ok())
    });
    assert_eq!(ok, 1);
}

#[test]
fn experiment_spec() {
    let ok = replay("experiment_spec", |d| {
        let Ok(spec) = ExperimentSpec::parse(&String::from_utf8_lossy(d)) else { return false };
        _ = spec.to_toml();
        spec.validate().is_ok()
    });
    assert_eq!(ok, 3);
}

#[test]
fn calibration() {
    let ok = replay("calibration", |d| {
        let Ok(cal) = parse_calibration(&String::from_utf8_lossy(d)) else { return false };
        same(&cal, &parse_calibration(&calibration_toml(&cal)).unwrap());
        true
    });
    assert!(ok >= 1);
}
