//! Per-bin optimum of every layout over a ratio range.
//!
//! `cargo run --release --example sweep_m6c12 -- 4 20`

use gearbox_opt::catalog::Catalog;
use gearbox_opt::design::Topology;
use gearbox_opt::optimizer::{sweep, Problem, SearchOptions};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u32>().expect("integer ratio bound"));
    let lo = args.next().unwrap_or(4);
    let hi = args.next().unwrap_or(20);
    let problem = Problem::for_motor(&Catalog::builtin(), "MAD-M6C12")
        .unwrap()
        .with_diameter_factor(1.25);
    let result = sweep(&problem, &Topology::ALL, lo, hi, &SearchOptions::default());

    print!("{:>7}", "bin");
    for t in Topology::ALL {
        print!("{:>10}", t.label());
    }
    println!();
    for bin in lo..hi {
        print!("{:>3}-{:<3}", bin, bin + 1);
        for t in Topology::ALL {
            match result.row(t, bin).and_then(|r| r.best.as_ref()) {
                Some(b) => print!("{:>10.4}", b.mass.total),
                None => print!("{:>10}", "-"),
            }
        }
        println!();
    }
    for t in Topology::ALL {
        let max = result.rows_for(t).filter(|r| r.best.is_some()).map(|r| r.bin_hi).max();
        println!("{} feasible up to {}", t.label(), max.map_or("none".into(), |m| format!("{m}:1")));
    }
}
