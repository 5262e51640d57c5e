//! Optimise a single-stage gearbox and write its CAD variable file.

use gearbox_opt::cad::{CadParams, CadVariableSet};
use gearbox_opt::catalog::Catalog;
use gearbox_opt::design::Topology;
use gearbox_opt::optimizer::{optimize, Problem, SearchOptions};
use gearbox_opt::scope::Group;

fn main() {
    let problem = Problem::for_motor(&Catalog::builtin(), "MN8014")
        .unwrap()
        .with_ratio_range(7.0, 8.0);
    let best = optimize(&problem, Topology::Sspg, &SearchOptions::default())
        .best
        .expect("a feasible design");
    let vars = CadVariableSet::from_design(&problem, &best.design, &CadParams::default()).unwrap();

    let path = std::env::temp_dir().join("sspg_variables.txt");
    vars.write(&path).unwrap();
    println!("{} -> {} ({} variables)", best.design, path.display(), vars.len());
    for group in Group::ALL {
        println!("  {:<9} {}", group.as_str(), vars.count(group));
    }
    for name in ["N_s1", "tip_d_s1", "root_d_r1", "planet_1_2_x", "housing_bolt_circle"] {
        if let Some(v) = vars.get(name) {
            println!("  {name} = {} {}", v.value, v.unit.as_str());
        }
    }
    let back = CadVariableSet::read(&path).unwrap();
    assert_eq!(back, vars.rounded());
}
