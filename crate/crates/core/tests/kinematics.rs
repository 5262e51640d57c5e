mod common;

use common::*;
use gearbox_opt::design::{GearStage, GearboxDesign, Module, Topology};
use gearbox_opt::kinematics::{efficiency, gear_ratio, stage_ratio, MeshEfficiencyModel};
use num_rational::Ratio;
use proptest::prelude::*;

#[test]
fn reference_ratios_are_exact() {
    let want = [
        (Topology::Sspg, Ratio::new(36, 5)),
        (Topology::Cpg, Ratio::from_integer(14)),
        (Topology::Dspg, Ratio::new(17748, 805)),
        (Topology::Wpg, Ratio::new(180, 11)),
    ];
    for (t, exact) in want {
        let r = gear_ratio(&reference_design(t)).unwrap();
        assert_eq!(r.exact, exact, "{t}");
        assert!((r.value - ratio_f64(&reference_design(t))).abs() < 1e-9);
        assert!(!r.reversed);
    }
}

#[test]
fn reference_efficiencies_match_hand_formulas() {
    let mesh = MeshEfficiencyModel::default();
    for t in [Topology::Sspg, Topology::Cpg, Topology::Dspg] {
        let d = reference_design(t);
        let got = efficiency(&d, &mesh).unwrap();
        assert!((got - efficiency_f64(&d, mesh.friction_factor)).abs() < 1e-12, "{t}");
    }
    // Below I_2 = 1 the Wolfrom expression leaves (0, 1].
    let wpg = reference_design(Topology::Wpg);
    let raw = efficiency_f64(&wpg, mesh.friction_factor);
    assert!((raw - 1.11334).abs() < 1e-5);
    assert!(efficiency(&wpg, &mesh).is_err());
}

#[test]
fn lossless_trains_are_exactly_efficient() {
    for t in Topology::ALL {
        assert_eq!(efficiency(&reference_design(t), &MeshEfficiencyModel::lossless()).unwrap(), 1.0, "{t}");
    }
}

fn m(tenths: u32) -> Module {
    Module::from_tenths(tenths)
}

prop_compose! {
    fn stage()(s in 18u32..80, p in 18u32..80, n in 2u32..6, mt in 5u32..13) -> GearStage {
        GearStage::new(s, p, s + 2 * p, m(mt), n)
    }
}

prop_compose! {
    fn design()(kind in 0..4, a in stage(), b in stage(), p2 in 18u32..80) -> GearboxDesign {
        match kind {
            0 => GearboxDesign::sspg(a),
            1 => GearboxDesign::cpg(a.sun_teeth, a.planet_teeth, p2, a.sun_teeth + a.planet_teeth + p2, a.module, a.module, a.planet_count),
            2 => GearboxDesign::dspg(a, b),
            _ => GearboxDesign::wpg(a.sun_teeth, a.planet_teeth, a.ring_teeth, p2, a.sun_teeth + a.planet_teeth + p2, a.module, a.module, a.planet_count),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ratio_matches_float_formula(d in design()) {
        let Ok(r) = gear_ratio(&d) else {
            // Only a Wolfrom train with I_2 = 1 has no finite ratio.
            prop_assert!(d.topology == Topology::Wpg && d.stage1.planet_teeth == d.stage2.planet_teeth);
            return Ok(());
        };
        prop_assert!((r.value - ratio_f64(&d)).abs() <= 1e-9 * r.value);
        prop_assert!((r.value - r.exact_f64()).abs() <= 1e-12 * r.value);
        if d.topology == Topology::Dspg {
            prop_assert_eq!(r.exact, stage_ratio(&d.stage1).exact * stage_ratio(&d.stage2).exact);
        }
    }

    #[test]
    fn efficiency_matches_float_formula(d in design(), k in 0.0f64..1.5) {
        let oracle = efficiency_f64(&d, k);
        match efficiency(&d, &MeshEfficiencyModel::new(k).unwrap()) {
            Ok(e) => {
                prop_assert!((e - oracle).abs() <= 1e-12);
                prop_assert!(e > 0.0 && e <= 1.0);
            }
            Err(_) => prop_assert!(!(oracle > 0.0 && oracle <= 1.0) || d.topology == Topology::Wpg),
        }
    }

    #[test]
    fn efficiency_falls_with_friction(d in design(), k in 0.0f64..1.4, dk in 0.0f64..0.1) {
        prop_assume!(d.topology != Topology::Wpg);
        let at = |k| efficiency(&d, &MeshEfficiencyModel::new(k).unwrap()).ok();
        if let (Some(a), Some(b)) = (at(k), at(k + dk)) {
            prop_assert!(b <= a + 1e-15);
        }
    }
}
