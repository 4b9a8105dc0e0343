#![no_main]

use libfuzzer_sys::fuzz_target;
use slipt_core::formats::{read_frame_raw, write_frame_raw};

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = read_frame_raw(data) {
        let mut out = Vec::new();
        write_frame_raw(&samples, &mut out).unwrap();
        assert_eq!(out, data);
    }
});
