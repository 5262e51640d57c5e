//! Fit the mesh friction factor to measured efficiencies by bisection.
//!
//! Efficiency decreases with the friction factor for these layouts, so each
//! target has a unique root on [0, 1.5].

use gearbox_opt::design::{GearboxDesign, Topology};
use gearbox_opt::kinematics::{efficiency, MeshEfficiencyModel};

fn eta(design: &GearboxDesign, k_f: f64) -> f64 {
    efficiency(design, &MeshEfficiencyModel::new(k_f).unwrap()).unwrap()
}

fn solve(design: &GearboxDesign, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.5);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if eta(design, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn main() {
    let sspg = GearboxDesign::from_rows(Topology::Sspg, ([25, 65, 155], 0.5, 3), ([0, 0, 0], 0.0, 0)).unwrap();
    let cpg = GearboxDesign::from_rows(Topology::Cpg, ([18, 66, 0], 0.6, 3), ([0, 33, 117], 0.6, 3)).unwrap();
    let measured = [(&sspg, 0.960), (&cpg, 0.938)];

    let mut fits = Vec::new();
    for (design, target) in measured {
        let k = solve(design, target);
        println!("{design}: efficiency {target} -> k_f = {k:.5}");
        fits.push(k);
    }
    // Joint least squares on the two residuals, by golden-section search.
    let sse = |k: f64| measured.iter().map(|(d, t)| (eta(d, k) - t).powi(2)).sum::<f64>();
    let (mut a, mut b) = (fits[0].min(fits[1]), fits[0].max(fits[1]));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if sse(c) < sse(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let k = 0.5 * (a + b);
    println!("joint fit k_f = {k:.5}");
    for (design, target) in measured {
        println!("  {} predicted {:.5}, measured {target}", design.topology.label(), eta(design, k));
    }
    let default = MeshEfficiencyModel::DEFAULT_FRICTION_FACTOR;
    println!("default k_f = {default}");
    for (design, target) in measured {
        println!("  {} predicted {:.5}, measured {target}", design.topology.label(), eta(design, default));
    }
}
