use slipt_core::presets::{Measured, PresetLibrary, BUILTIN};

/// (name, diameter [mm], segments, junction area [mm²], bandwidth, pmp, imp/isc, pce, rate)
#[allow(clippy::type_complexity)]
const MEASURED: [(&str, f64, usize, f64, f64, f64, f64, f64, f64); 7] = [
    ("S2", 1.0, 2, 0.48, 0.88e9, 0.49e-3, 0.962, 0.221, 2.44e9),
    ("S4", 1.0, 4, 0.25, 0.94e9, 0.39e-3, 0.850, 0.198, 3.29e9),
    ("M2", 1.5, 2, 1.11, 0.62e9, 0.89e-3, 0.995, 0.387, 1.23e9),
    ("M4", 1.5, 4, 0.49, 0.93e9, 0.59e-3, 0.901, 0.283, 2.56e9),
    ("L2", 2.08, 2, 1.92, 0.49e9, 0.89e-3, 0.972, 0.397, 0.761e9),
    ("L4", 2.08, 4, 0.93, 0.66e9, 0.67e-3, 0.895, 0.325, 1.59e9),
    ("L6", 2.08, 6, 0.62, 0.96e9, 0.23e-3, 0.661, 0.151, 3.8e9),
];

#[test]
fn measured_presets_match_reference_literals() {
    let lib = PresetLibrary::builtin();
    for (name, d, n, area, bandwidth, pmp, imp_isc, pce, data_rate) in MEASURED {
        let p = lib.preset(name).unwrap();
        assert_eq!(p.cell_diameter, d, "{name}");
        assert_eq!(p.n_segments, n, "{name}");
        assert_eq!(p.junction_area, Some(area), "{name}");
        assert_eq!(p.measured, Some(Measured { bandwidth, pmp, imp_isc, pce, data_rate }), "{name}");
    }
}

#[test]
fn six_segment_small_and_medium_cells_are_unmeasured() {
    let lib = PresetLibrary::builtin();
    for (name, d) in [("S6", 1.0), ("M6", 1.5)] {
        let p = lib.preset(name).unwrap();
        assert_eq!((p.cell_diameter, p.n_segments), (d, 6));
        assert_eq!(p.junction_area, None);
        assert_eq!(p.measured, None);
    }
}

#[test]
fn builtin_round_trips_through_toml() {
    let lib = PresetLibrary::builtin();
    assert_eq!(PresetLibrary::from_toml(BUILTIN).unwrap(), lib);
}
