//! Ratio, efficiency and feasibility of four reference designs, one per layout.

use gearbox_opt::catalog::Catalog;
use gearbox_opt::constraints::{check_all, ConstraintParams};
use gearbox_opt::design::{GearboxDesign, Topology};
use gearbox_opt::kinematics::{efficiency, gear_ratio, MeshEfficiencyModel};

fn main() {
    let catalog = Catalog::builtin();
    let mesh = MeshEfficiencyModel::default();
    let designs = [
        (Topology::Sspg, ([25, 65, 155], 0.5, 3), ([0, 0, 0], 0.0, 0), "MN8014", 1.0),
        (Topology::Cpg, ([18, 66, 0], 0.6, 3), ([0, 33, 117], 0.6, 3), "MAD-M6C12", 1.25),
        (Topology::Dspg, ([35, 52, 139], 0.5, 3), ([23, 28, 79], 1.0, 3), "MAD-M6C12", 1.25),
        (Topology::Wpg, ([66, 45, 156], 0.5, 6), ([0, 33, 144], 0.5, 6), "MAD-M6C12", 1.25),
    ];
    for (topology, s1, s2, motor, k_mgd) in designs {
        let design = GearboxDesign::from_rows(topology, s1, s2).unwrap();
        let motor = catalog.motor(motor).unwrap();
        let ratio = gear_ratio(&design).unwrap();
        let eta = match efficiency(&design, &mesh) {
            Ok(e) => format!("{e:.4}"),
            Err(e) => format!("n/a ({e})"),
        };
        let params = ConstraintParams::default()
            .with_diameter_factor(k_mgd)
            .with_ratio_bounds(ratio.value.floor(), ratio.value.floor() + 1.0);
        let report = check_all(&design, motor, &params, false);
        println!("{design}");
        println!("  ratio {} = {:.4}{}", ratio.exact, ratio.value, if ratio.reversed { " reversed" } else { "" });
        println!("  efficiency {eta}");
        if report.feasible {
            println!("  feasible with {} at K_mgd {k_mgd}", motor.name);
        }
        for v in &report.violations {
            println!("  violates {v}");
        }
    }
}
