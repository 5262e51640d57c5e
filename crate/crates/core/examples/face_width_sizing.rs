//! Tooth face widths from the bending-strength sizing rule.

use gearbox_opt::catalog::Catalog;
use gearbox_opt::design::{GearboxDesign, Topology};
use gearbox_opt::sizing::{actuator_width, lewis_face_width, stage_tangential_force, SizingParams};

fn main() {
    let params = SizingParams::default();
    println!("force 100 N, 20 teeth, {} MPa, safety {}", params.allowable_stress, params.safety_factor);
    for m in [0.5, 0.6, 0.8, 1.0, 1.5] {
        match lewis_face_width(100.0, m, 20, &params) {
            Ok(b) => println!("  module {m:.1}: b = {b:.2} mm"),
            Err(e) => println!("  module {m:.1}: {e}"),
        }
    }

    let catalog = Catalog::builtin();
    let motor = catalog.motor("MAD-M6C12").unwrap();
    let design =
        GearboxDesign::from_rows(Topology::Dspg, ([35, 52, 139], 0.5, 3), ([23, 28, 79], 1.0, 3)).unwrap();
    println!("{design}");
    for stage in 1..=2 {
        let load = stage_tangential_force(&design, stage, motor).unwrap();
        println!(
            "  stage {stage}: {:.1} N on {} teeth, module {}",
            load.force, load.teeth, load.module
        );
    }
    let w = actuator_width(&design, motor, &params).unwrap();
    println!(
        "  face widths {:.2} / {:.2} mm, gearbox {:.2} mm, actuator {:.2} mm",
        w.stage_face_widths[0], w.stage_face_widths[1], w.gearbox_width, w.actuator_width
    );
}
