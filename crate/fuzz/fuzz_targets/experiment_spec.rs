#![no_main]

use libfuzzer_sys::fuzz_target;
use slipt_cli::ExperimentSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = ExperimentSpec::parse(text) {
        _ = spec.validate();
        _ = spec.to_toml();
    }
});
