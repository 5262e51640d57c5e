//! Search with a motor that is not in the catalog and a custom cost.

use gearbox_opt::catalog::{Catalog, MotorSpec};
use gearbox_opt::constraints::ConstraintParams;
use gearbox_opt::design::Topology;
use gearbox_opt::kinematics::MeshEfficiencyModel;
use gearbox_opt::mass::MassModel;
use gearbox_opt::optimizer::{optimize, CostWeights, Problem, SearchOptions};
use gearbox_opt::scope::LayoutParams;
use gearbox_opt::sizing::SizingParams;

fn main() {
    let motor = MotorSpec {
        name: "bench-60".into(),
        outer_diameter: 60.0,
        stack_length: 20.0,
        mass: 0.120,
        peak_torque: 0.8,
        shaft_diameter: 5.0,
        bolt_circle_diameter: 25.0,
        bolt_count: 3,
    };
    let catalog = Catalog::builtin();
    let constraints = ConstraintParams::default().with_diameter_factor(1.3);
    // Efficiency weighted heavily, width ignored, aiming at 20:1.
    let weights = CostWeights::new(1.0, 5.0, 0.0, 0.05);
    let problem = Problem::new(
        motor,
        constraints,
        SizingParams::default(),
        LayoutParams::default(),
        MeshEfficiencyModel::default(),
        weights,
        MassModel::builtin(&catalog).unwrap(),
    )
    .with_ratio_target(20.0);

    for t in Topology::ALL {
        let outcome = optimize(&problem, t, &SearchOptions::default());
        match outcome.best {
            Some(b) => println!(
                "{:<5} {:>8.4} eta {:.4} {:.4} kg cost {:.5}  {}",
                t.label(),
                b.ratio.value,
                b.efficiency,
                b.mass.total,
                b.cost,
                b.design
            ),
            None => println!("{:<5} no feasible design", t.label()),
        }
    }
}
