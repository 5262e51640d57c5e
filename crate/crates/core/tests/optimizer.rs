mod common;

use common::*;
use gearbox_opt::catalog::Catalog;
use gearbox_opt::constraints::is_feasible;
use gearbox_opt::design::{Module, Topology};
use gearbox_opt::optimizer::{enumerate_designs, optimize, CostWeights, Problem, SearchOptions, SeriesIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_weights(rng: &mut ChaCha8Rng) -> CostWeights {
    CostWeights {
        gr_req: Some(rng.gen_range(4.0..40.0)),
        ..CostWeights::new(
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..0.05),
            rng.gen_range(0.0..0.5),
        )
    }
}

#[test]
fn enumeration_matches_naive_feasible_set() {
    let problem = reduced_problem(CostWeights::default());
    for t in Topology::ALL {
        let mut fast: Vec<_> = enumerate_designs(problem.motor(), problem.constraints(), t)
            .iter()
            .map(|d| d.variables())
            .collect();
        let mut slow: Vec<_> = naive_feasible(&problem, t).iter().map(|d| d.variables()).collect();
        fast.sort();
        slow.sort();
        assert!(!slow.is_empty(), "{t}: reduced space has no feasible design");
        assert_eq!(fast, slow, "{t}");
    }
}

#[test]
fn optimum_matches_naive_oracle_for_random_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let base = reduced_problem(CostWeights::default());
    for t in Topology::ALL {
        let set = metrics(&base, &naive_feasible(&base, t));
        for _ in 0..10 {
            let w = random_weights(&mut rng);
            let (cost, want) = argmin(&set, |m| oracle_cost(&w, m)).unwrap();
            let got = optimize(&reduced_problem(w), t, &SearchOptions::default()).best.unwrap();
            assert!(close(got.cost, cost, 1e-12), "{t}: {} vs {cost}", got.cost);
            assert!(got.design == want.design || close(oracle_cost(&w, &want), got.cost, 1e-12));
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let problem = Problem::for_motor(&Catalog::builtin(), "MAD-M6C12")
        .unwrap()
        .with_diameter_factor(1.25)
        .with_ratio_range(14.0, 15.0);
    for t in [Topology::Cpg, Topology::Wpg] {
        let runs: Vec<String> = [1, 2, 8]
            .map(|n| {
                let mut o = optimize(&problem, t, &SearchOptions { workers: Some(n) });
                o.stats.elapsed_ms = 0.0;
                serde_json::to_string(&o).unwrap()
            })
            .to_vec();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }
}

#[test]
fn scaling_weights_by_powers_of_two_keeps_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for t in Topology::ALL {
        let w = random_weights(&mut rng);
        let reference = optimize(&reduced_problem(w), t, &SearchOptions::default()).best.unwrap();
        for k in [-3, -1, 1, 4] {
            let scaled = w.scaled(2f64.powi(k));
            let got = optimize(&reduced_problem(scaled), t, &SearchOptions::default()).best.unwrap();
            assert_eq!(got.design, reference.design, "{t} scaled by 2^{k}");
            assert_eq!(got.cost, reference.cost * 2f64.powi(k));
        }
    }
}

#[test]
fn optimum_is_no_worse_than_the_reference_compound_design() {
    let problem = Problem::for_motor(&Catalog::builtin(), "MAD-M6C12")
        .unwrap()
        .with_diameter_factor(1.25)
        .with_ratio_range(13.0, 15.0);
    let reference = reference_design(Topology::Cpg);
    assert!(is_feasible(&reference, problem.motor(), problem.constraints()));
    let best = optimize(&problem, Topology::Cpg, &SearchOptions::default()).best.unwrap();
    assert!(best.cost <= problem.cost_of(&reference).unwrap());
    let all = enumerate_designs(problem.motor(), problem.constraints(), Topology::Cpg);
    assert!(all.contains(&reference));
}

#[test]
fn series_index_agrees_with_pair_enumeration() {
    let m = |mm| Module::from_mm(mm).unwrap();
    let mut params = reduced_params();
    params.module_set = vec![m(0.5), m(0.8)];
    params.module_max = m(0.8);
    params.teeth_max = 80;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (lo, hi) in [(9.0, 12.0), (20.0, 26.0), (40.0, 41.0)] {
        let w = random_weights(&mut rng);
        let problem = reduced_problem(w).with_constraints(params.clone().with_ratio_bounds(lo, hi));
        let pairs = enumerate_designs(problem.motor(), problem.constraints(), Topology::Dspg);
        let set = metrics(&problem, &pairs);
        let best = SeriesIndex::build(&problem).optimize(&problem, &SearchOptions::default());
        match argmin(&set, |mm| oracle_cost(&w, mm)) {
            None => assert!(best.best.is_none()),
            Some((cost, want)) => {
                let got = best.best.unwrap();
                assert!(close(got.cost, cost, 1e-12), "[{lo}, {hi}]: {} vs {cost}", got.cost);
                assert!(got.design == want.design || close(oracle_cost(&w, &want), got.cost, 1e-12));
                assert_eq!(best.stats.feasible as usize, pairs.len());
            }
        }
    }
}

#[test]
fn optimum_matches_naive_oracle_over_mixed_modules() {
    let m = |mm| Module::from_mm(mm).unwrap();
    let mut params = reduced_params();
    params.module_set = vec![m(0.5), m(0.6)];
    params.module_max = m(0.6);
    params.teeth_max = 80;
    params.planets_max = 4;
    let base = reduced_problem(CostWeights::default()).with_constraints(params.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for t in [Topology::Sspg, Topology::Cpg, Topology::Wpg] {
        let naive = naive_feasible(&base, t);
        let mut fast: Vec<_> = enumerate_designs(base.motor(), base.constraints(), t)
            .iter()
            .map(|d| d.variables())
            .collect();
        let mut slow: Vec<_> = naive.iter().map(|d| d.variables()).collect();
        fast.sort();
        slow.sort();
        assert_eq!(fast, slow, "{t}");
        let set = metrics(&base, &naive);
        for _ in 0..5 {
            let w = random_weights(&mut rng);
            let problem = reduced_problem(w).with_constraints(params.clone());
            let (cost, _) = argmin(&set, |mm| oracle_cost(&w, mm)).unwrap();
            let got = optimize(&problem, t, &SearchOptions::default()).best.unwrap();
            assert!(close(got.cost, cost, 1e-12), "{t}: {} vs {cost}", got.cost);
        }
    }
}
