#![no_main]

use libfuzzer_sys::fuzz_target;
use slipt_core::formats::{read_iv_csv, write_iv_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(curve) = read_iv_csv(data) else { return };
    let mut out = Vec::new();
    write_iv_csv(&curve, &mut out).unwrap();
    let again = read_iv_csv(out.as_slice()).unwrap();
    assert_eq!(format!("{curve:?}"), format!("{again:?}"));
});
