mod common;

use common::*;
use gearbox_opt::cad::{CadParams, CadVariableSet};
use gearbox_opt::catalog::Catalog;
use gearbox_opt::design::Topology;
use gearbox_opt::expr::Expr;
use gearbox_opt::optimizer::Problem;
use gearbox_opt::scope::Group;

fn reference_set(t: Topology) -> CadVariableSet {
    let (motor, k) = reference_motor(t);
    let problem = Problem::for_motor(&Catalog::builtin(), motor).unwrap().with_diameter_factor(k);
    CadVariableSet::from_design(&problem, &reference_design(t), &CadParams::default()).unwrap()
}

#[test]
fn export_parse_export_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for t in Topology::ALL {
        let set = reference_set(t);
        let path = dir.path().join(format!("{}_variables.txt", t.as_str()));
        set.write(&path).unwrap();
        let first = std::fs::read_to_string(&path).unwrap();
        let back = CadVariableSet::read(&path).unwrap();
        assert_eq!(back, set.rounded(), "{t}");
        assert_eq!(back.to_text(), first, "{t}");
    }
}

#[test]
fn variable_counts_per_layout() {
    for t in Topology::ALL {
        let set = reference_set(t);
        assert!((120..=200).contains(&set.len()), "{t}: {}", set.len());
        // Variables that are identically zero for a layout are left out.
        let active = match t {
            Topology::Sspg => 5,
            Topology::Cpg => 8,
            Topology::Wpg => 9,
            Topology::Dspg => 10,
        };
        assert_eq!(set.count(Group::Optimization), active, "{t}");
    }
}

#[test]
fn dependent_values_follow_their_expressions() {
    for t in Topology::ALL {
        let set = reference_set(t);
        let names: Vec<&str> = set.variables.iter().map(|v| v.name.as_str()).collect();
        let values: Vec<f64> = set.variables.iter().map(|v| v.value).collect();
        for v in &set.variables {
            let Some(src) = &v.expression else {
                assert_ne!(v.group, Group::Dependent, "{t}: {} has no expression", v.name);
                continue;
            };
            let e = Expr::compile_with_names(src, &names).unwrap_or_else(|e| panic!("{t}: {}: {e}", v.name));
            let got = e.eval(&values);
            assert!((got - v.value).abs() <= 1e-9 * v.value.abs().max(1.0), "{t}: {} = {} but {src} = {got}", v.name, v.value);
        }
    }
}

#[test]
fn reference_pitch_diameters() {
    let set = reference_set(Topology::Cpg);
    let mm = |n: &str| set.get(n).unwrap().value;
    assert!((mm("d_s1") - 10.8).abs() < 1e-12);
    assert!((mm("d_p2") - 19.8).abs() < 1e-12);
    assert!((mm("d_r2") - 70.2).abs() < 1e-12);
    assert!((mm("a_1") - 25.2).abs() < 1e-12);
}
