use proptest::prelude::*;
use slipt_core::safety::*;

#[test]
fn appendix_scenario() {
    let r = assess(&SafetyScenario::default()).unwrap();
    assert!((r.angular_subtense - 346.4e-3).abs() <= 0.2e-3, "{}", r.angular_subtense);
    assert_eq!(r.class, SourceClass::Large);
    assert!((r.mpe / 181.84 - 1.0).abs() <= 0.005, "{}", r.mpe);
    assert!((r.irradiance / 2.08 - 1.0).abs() <= 0.005, "{}", r.irradiance);
    assert!((r.margin / 87.42 - 1.0).abs() <= 0.01, "{}", r.margin);
    assert_eq!(r.margin, r.mpe / r.irradiance);
    assert_eq!(r.verdict, Verdict::Safe);
}

#[test]
fn independent_arithmetic() {
    // Hand evaluation: C4 = 10^0.3, C6 = 100/1.5, t^-1/4 = 30000^-1/4.
    let mpe = 18.0 * 10f64.powf(0.3) * (100.0 / 1.5) / 30000f64.sqrt().sqrt();
    let e = 80e-6 / (std::f64::consts::PI * 3.5e-3 * 3.5e-3);
    let r = assess(&SafetyScenario::default()).unwrap();
    assert!((r.mpe - mpe).abs() < 1e-10 * mpe);
    assert!((r.irradiance - e).abs() < 1e-12 * e);
}

#[test]
fn tenfold_power_cuts_margin_tenfold() {
    let s = SafetyScenario::default();
    let a = assess(&s).unwrap();
    let b = assess(&SafetyScenario { received_power_at_pupil: s.received_power_at_pupil * 10.0, ..s }).unwrap();
    assert!((a.margin / b.margin - 10.0).abs() < 1e-12);
}

#[test]
fn out_of_branch_inputs_are_errors() {
    let s = SafetyScenario::default();
    assert!(matches!(assess(&SafetyScenario { wavelength: 1300.0, ..s }), Err(SafetyError::UnsupportedWavelength(_))));
    assert!(matches!(
        assess(&SafetyScenario { source_diameter: 5.0, ..s }),
        Err(SafetyError::UnsupportedSubtense { .. })
    ));
    assert!(assess(&SafetyScenario { pupil_radius: 0.0, ..s }).is_err());
}

proptest! {
    #[test]
    fn margin_scales_with_power_and_time(p in 1e-7f64..1e-2, t in 1.0f64..3e4, k in 0.1f64..10.0) {
        let s = SafetyScenario { received_power_at_pupil: p, exposure_time: t, ..SafetyScenario::default() };
        let base = assess(&s).unwrap().margin;
        let more_power = assess(&SafetyScenario { received_power_at_pupil: p * k, ..s }).unwrap().margin;
        let longer = assess(&SafetyScenario { exposure_time: t * k, ..s }).unwrap().margin;
        prop_assert!((base / more_power / k - 1.0).abs() < 1e-12);
        prop_assert!((longer / base / k.powf(-0.25) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_round_trip(w in 700.0f64..1050.0, d in 0.1f64..100.0, z in 1.0f64..1e4, r in 0.5f64..5.0) {
        let s = SafetyScenario { wavelength: w, source_diameter: d, evaluation_distance: z, pupil_radius: r, ..SafetyScenario::default() };
        let back = SafetyScenario::from_si(&s.to_si());
        for (a, b) in [(s.wavelength, back.wavelength), (s.source_diameter, back.source_diameter),
                       (s.evaluation_distance, back.evaluation_distance), (s.pupil_radius, back.pupil_radius)] {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn class_matches_thresholds(alpha in 0.0f64..1.0) {
        let c = classify(alpha);
        let expect = if alpha < ALPHA_MIN { SourceClass::Point } else if alpha < ALPHA_MAX { SourceClass::Intermediate } else { SourceClass::Large };
        prop_assert_eq!(c, expect);
    }
}
