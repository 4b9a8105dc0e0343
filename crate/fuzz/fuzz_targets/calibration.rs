#![no_main]

use libfuzzer_sys::fuzz_target;
use slipt_cli::harness::{calibration_toml, parse_calibration};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cal) = parse_calibration(text) {
        let again = parse_calibration(&calibration_toml(&cal)).unwrap();
        assert_eq!(format!("{again:?}"), format!("{cal:?}"));
    }
});
