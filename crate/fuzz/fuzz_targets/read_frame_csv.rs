#![no_main]

use libfuzzer_sys::fuzz_target;
use slipt_core::formats::{read_frame_csv, write_frame_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(samples) = read_frame_csv(data) else { return };
    let mut out = Vec::new();
    write_frame_csv(&samples, &mut out).unwrap();
    let again = read_frame_csv(out.as_slice()).unwrap();
    assert_eq!(format!("{samples:?}"), format!("{again:?}"));
});
