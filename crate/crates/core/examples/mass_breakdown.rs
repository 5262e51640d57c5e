//! Part-by-part mass of a compound planetary gearbox.

use gearbox_opt::catalog::Catalog;
use gearbox_opt::design::{GearboxDesign, Topology};
use gearbox_opt::optimizer::Problem;

fn main() {
    let problem = Problem::for_motor(&Catalog::builtin(), "MAD-M6C12")
        .unwrap()
        .with_diameter_factor(1.25)
        .with_ratio_range(13.0, 15.0);
    let design = GearboxDesign::from_rows(Topology::Cpg, ([18, 66, 0], 0.6, 3), ([0, 33, 117], 0.6, 3)).unwrap();
    let eval = problem.evaluate(&design).unwrap();

    println!("{design}");
    let faces: Vec<String> = eval.width.stage_face_widths.iter().map(|b| format!("{b:.2}")).collect();
    println!("face widths {} mm, actuator width {:.2} mm", faces.join(" / "), eval.width.actuator_width);
    let mut parts: Vec<(&String, &f64)> = eval.mass.per_component.iter().collect();
    parts.sort_by(|a, b| b.1.total_cmp(a.1));
    for (name, kg) in parts {
        println!("  {name:<20} {:>8.2} g", kg * 1e3);
    }
    println!("  {:<20} {:>8.2} g", "gearbox", eval.mass.gearbox_mass * 1e3);
    println!("  {:<20} {:>8.2} g", "motor", eval.mass.motor_mass * 1e3);
    println!("  {:<20} {:>8.2} g", "actuator", eval.mass.total * 1e3);
}
