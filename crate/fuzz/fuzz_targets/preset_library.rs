#![no_main]

use libfuzzer_sys::fuzz_target;
use slipt_core::presets::PresetLibrary;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(lib) = PresetLibrary::from_toml(text) {
        for p in &lib.devices {
            _ = p.geometry();
        }
    }
});
