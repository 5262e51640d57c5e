//! Best compound planetary design between 13:1 and 15:1 for a MAD M6C12.

use gearbox_opt::catalog::Catalog;
use gearbox_opt::design::Topology;
use gearbox_opt::optimizer::{optimize, Problem, SearchOptions};

fn main() {
    let problem = Problem::for_motor(&Catalog::builtin(), "MAD-M6C12")
        .unwrap()
        .with_diameter_factor(1.25)
        .with_ratio_range(13.0, 15.0);
    let outcome = optimize(&problem, Topology::Cpg, &SearchOptions::default());
    let stats = &outcome.stats;
    println!(
        "{} candidates, {} feasible, {:.1} ms",
        stats.examined, stats.feasible, stats.elapsed_ms
    );
    let Some(best) = outcome.best else {
        println!("no feasible design");
        return;
    };
    println!("{}", best.design);
    println!("ratio      {:.4}", best.ratio.value);
    println!("efficiency {:.4}", best.efficiency);
    println!("mass       {:.4} kg", best.mass.total);
    println!("width      {:.2} mm", best.width.actuator_width);
    println!("cost       {:.5}", best.cost);
}
