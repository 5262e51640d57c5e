mod common;

use common::*;
use gearbox_opt::design::{GearStage, GearboxDesign};

#[test]
fn breakdown_is_additive_and_non_negative() {
    let p = wide_problem();
    for d in random_feasible(50, 1) {
        check_additivity(&p, &d).unwrap();
    }
}

#[test]
fn mass_grows_with_face_width_teeth_and_module() {
    let p = wide_problem();
    for d in random_feasible(50, 2) {
        check_monotonicity(&p, &d).unwrap();
    }
}

#[test]
fn one_more_planet_adds_one_set_of_planet_parts() {
    let p = wide_problem();
    for d in random_feasible(50, 3) {
        check_planet_multiplicity(&p, &d).unwrap();
    }
}

#[test]
fn empty_gearbox_is_motor_plus_housing() {
    let p = wide_problem();
    let d = GearboxDesign::sspg(GearStage::EMPTY);
    let scope = p.base_scope().with_design(&d, [0.0; 2], 0.0);
    let b = p.mass_model().breakdown(&scope, true, p.motor().mass).unwrap();
    assert!(b
        .per_component
        .keys()
        .all(|k| !per_planet_part(k) && !k.starts_with("sun") && !k.starts_with("ring")));
    assert!(b.per_component.contains_key("housing_shell"));
    assert!(b.total >= p.motor().mass);
}

#[test]
fn ring_gear_by_hand() {
    use gearbox_opt::catalog::Catalog;
    use gearbox_opt::design::Module;
    use gearbox_opt::mass::{gear_mass, GearRole};
    let pla = Catalog::builtin().material("PLA").unwrap().clone();
    let stage = GearStage::new(25, 65, 155, Module::from_tenths(5), 3);
    // Shell of 77.5 mm bore, 5 mm wall, 10 mm tall, 1240 kg/m^3.
    let want = std::f64::consts::PI / 4.0 * (87.5f64.powi(2) - 77.5f64.powi(2)) * 10.0 * 1e-9 * pla.density;
    let got = gear_mass(&stage, GearRole::Ring, 10.0, &pla, 5.0).unwrap();
    assert!((got - want).abs() < 1e-15);
    let sun = std::f64::consts::PI / 4.0 * 12.5f64.powi(2) * 10.0 * 1e-9 * pla.density;
    assert!((gear_mass(&stage, GearRole::Sun, 10.0, &pla, 5.0).unwrap() - sun).abs() < 1e-15);
}
