#![no_main]

use libfuzzer_sys::fuzz_target;
use slipt_core::formats::{read_plan_csv, write_plan_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(plan) = read_plan_csv(data) else { return };
    let mut out = Vec::new();
    write_plan_csv(&plan, &mut out).unwrap();
    let again = read_plan_csv(out.as_slice()).unwrap();
    assert_eq!(format!("{plan:?}"), format!("{again:?}"));
});
