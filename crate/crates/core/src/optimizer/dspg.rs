//! Pairwise search for two single stages in series.
//!
//! Every constraint family except the ratio acts on one stage at a time, so
//! the feasible pairs are the ratio-compatible pairs of a single feasible
//! stage list. Efficiency, first-layer face width and the mass of parts that
//! depend on one stage only are computed once per stage; a pair then needs
//! its second-layer width and the parts that depend on both stages. The
//! per-class partial sums give a lower bound on the cost that lets most pairs
//! be skipped once a partition has an incumbent.

use std::ops::Range;
use std::time::Instant;

use num_rational::Ratio;

use crate::constraints::ConstraintParams;
use crate::design::{GearStage, GearboxDesign, Topology};
use crate::kinematics::{ratio_within, stage_efficiency, stage_ratio};
use crate::scope::Dependence;
use crate::sizing::{lewis_face_width, series_second_load, stack_widths, stage_tangential_force};

use super::enumerate::Space;
use super::{finish, run_partitions, Local, OptimizeOutcome, Problem, SearchOptions};

#[derive(Debug, Clone, Copy)]
struct StageEntry {
    stage: GearStage,
    exact: Ratio<i64>,
    ratio: f64,
    eta: f64,
    /// Face width and stage-1 part mass when used as the first stage.
    first: Option<(f64, f64)>,
    /// Stage-2 part mass when used as the second stage.
    second: Option<f64>,
}

/// Feasible single stages with the per-stage quantities of the series search.
/// Built once per motor and parameter set; reusable across ratio bounds and
/// cost weights.
#[derive(Debug, Clone)]
pub struct SeriesIndex {
    stages: Vec<StageEntry>,
    /// Stage indices sorted by ratio.
    by_ratio: Vec<usize>,
    sorted_ratios: Vec<f64>,
    partitions: Vec<Range<usize>>,
    const_mass: Option<f64>,
}

fn stage_params(params: &ConstraintParams) -> ConstraintParams {
    params.clone().with_ratio_bounds(0.0, 1e6)
}

fn stage_list(space: &Space) -> (Vec<GearStage>, Vec<Range<usize>>) {
    let relaxed = stage_params(space.params);
    let mut stages = Vec::new();
    let mut partitions = Vec::new();
    for (m, n) in space.keys() {
        let start = stages.len();
        space.visit_stages(m, n, &mut |s| {
            if crate::constraints::is_feasible(&GearboxDesign::sspg(s), space.motor, &relaxed) {
                stages.push(s);
            }
        });
        partitions.push(start..stages.len());
    }
    (stages, partitions)
}

/// Sorted-ratio window `[lo, hi]` around `1 / g1`, loosened for rounding.
fn window(sorted: &[f64], g1: f64, params: &ConstraintParams) -> Range<usize> {
    let lo = params.gr_min / g1 * (1.0 - 1e-9);
    let hi = params.gr_max / g1 * (1.0 + 1e-9);
    sorted.partition_point(|&r| r < lo)..sorted.partition_point(|&r| r <= hi)
}

fn sort_by_ratio(ratios: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let mut by_ratio: Vec<usize> = (0..ratios.len()).collect();
    by_ratio.sort_by(|&a, &b| ratios[a].total_cmp(&ratios[b]).then(a.cmp(&b)));
    let sorted = by_ratio.iter().map(|&i| ratios[i]).collect();
    (by_ratio, sorted)
}

pub(crate) fn visit_pairs(space: &Space, f: &mut impl FnMut(GearboxDesign)) {
    let (stages, _) = stage_list(space);
    let ratios: Vec<f64> = stages.iter().map(|s| stage_ratio(s).value).collect();
    let (by_ratio, sorted) = sort_by_ratio(&ratios);
    let (lo, hi) = space.params.ratio_bounds();
    for (i, s1) in stages.iter().enumerate() {
        let g1 = stage_ratio(s1).exact;
        for &j in &by_ratio[window(&sorted, ratios[i], space.params)] {
            if ratio_within(&(g1 * stage_ratio(&stages[j]).exact), &lo, &hi) {
                f(GearboxDesign::dspg(*s1, stages[j]));
            }
        }
    }
}

impl SeriesIndex {
    pub fn build(problem: &Problem) -> SeriesIndex {
        let space = Space::new(problem.motor(), problem.constraints());
        let (list, partitions) = stage_list(&space);
        let motor = problem.motor();
        let sizing = problem.sizing();
        let mass = problem.mass_model();
        let stages: Vec<StageEntry> = list
            .iter()
            .map(|&s| {
                let pair = GearboxDesign::dspg(s, s);
                let b1 = stage_tangential_force(&pair, 1, motor)
                    .ok()
                    .and_then(|load| lewis_face_width(load.force, load.module, load.teeth, sizing).ok());
                let faces = [b1.unwrap_or(sizing.min_face_width); 2];
                let scope = problem.base_scope().with_design(&pair, faces, 0.0);
                let first = b1.and_then(|b| Some((b, mass.class_mass(&scope, false, Dependence::Stage1).ok()?)));
                let second = mass.class_mass(&scope, false, Dependence::Stage2).ok();
                let r = stage_ratio(&s);
                StageEntry {
                    stage: s,
                    exact: r.exact,
                    ratio: r.value,
                    eta: stage_efficiency(&s, problem.mesh()),
                    first,
                    second,
                }
            })
            .collect();
        let const_mass = list.first().and_then(|&s| {
            let pair = GearboxDesign::dspg(s, s);
            let scope = problem.base_scope().with_design(&pair, [sizing.min_face_width; 2], 0.0);
            mass.class_mass(&scope, false, Dependence::Const).ok()
        });
        let ratios: Vec<f64> = stages.iter().map(|e| e.ratio).collect();
        let (by_ratio, sorted_ratios) = sort_by_ratio(&ratios);
        SeriesIndex {
            stages,
            by_ratio,
            sorted_ratios,
            partitions,
            const_mass,
        }
    }

    /// Number of feasible single stages.
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Optimum under the problem's ratio bounds and weights. The problem must
    /// share motor, constraint, sizing, layout and mass parameters (apart from
    /// the ratio bounds) with the one the index was built from.
    pub fn optimize(&self, problem: &Problem, options: &SearchOptions) -> OptimizeOutcome {
        let start = Instant::now();
        let local = self.search(problem, options);
        finish(problem, Topology::Dspg, local, start)
    }

    pub(crate) fn search(&self, problem: &Problem, options: &SearchOptions) -> Local {
        run_partitions(&self.partitions, options, |range| self.search_partition(problem, range.clone()))
    }

    fn search_partition(&self, problem: &Problem, range: Range<usize>) -> Local {
        let mut local = Local::default();
        local.stats.partitions = 1;
        let params = problem.constraints();
        let (lo, hi) = params.ratio_bounds();
        let as_f64 = |r: &Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
        let (lo_f, hi_f) = (as_f64(&lo), as_f64(&hi));
        let motor = problem.motor();
        let sizing = problem.sizing();
        let weights = problem.weights();
        let mass = problem.mass_model();
        for e1 in &self.stages[range] {
            let win = window(&self.sorted_ratios, e1.ratio, params);
            local.stats.examined += win.len() as u64;
            for &j in &self.by_ratio[win] {
                let e2 = &self.stages[j];
                let ratio = e1.ratio * e2.ratio;
                let clear = ratio > lo_f * (1.0 + 1e-12) && ratio < hi_f * (1.0 - 1e-12);
                if !clear && !ratio_within(&(e1.exact * e2.exact), &lo, &hi) {
                    continue;
                }
                local.stats.feasible += 1;
                let (Some(c), Some((b1, m1)), Some(m2)) = (self.const_mass, e1.first, e2.second) else {
                    local.stats.rejected += 1;
                    continue;
                };
                let eta = e1.eta * e2.eta;
                if !(eta > 0.0 && eta <= 1.0) {
                    local.stats.rejected += 1;
                    continue;
                }
                let load = series_second_load(e1.ratio, &e2.stage, motor);
                let Ok(b2) = lewis_face_width(load.force, load.module, load.teeth, sizing) else {
                    local.stats.rejected += 1;
                    continue;
                };
                let (gearbox_width, actuator_width) = stack_widths(Topology::Dspg, [b1, b2], motor, sizing);
                let partial = (c + m1) + m2;
                let bound = weights.cost(partial + motor.mass, eta, actuator_width, ratio);
                if bound > local.incumbent() {
                    local.stats.pruned += 1;
                    continue;
                }
                let design = GearboxDesign::dspg(e1.stage, e2.stage);
                let scope = problem.base_scope().with_design(&design, [b1, b2], gearbox_width);
                let incumbent = local.incumbent();
                let over = |g: f64| weights.cost((partial + g) + motor.mass, eta, actuator_width, ratio) > incumbent;
                let g = match mass.class_mass_until(&scope, false, Dependence::Global, over) {
                    Ok(Some(g)) => g,
                    Ok(None) => {
                        local.stats.pruned += 1;
                        continue;
                    }
                    Err(_) => {
                        local.stats.rejected += 1;
                        continue;
                    }
                };
                local.stats.evaluated += 1;
                let cost = weights.cost((partial + g) + motor.mass, eta, actuator_width, ratio);
                local.offer(cost, design);
            }
        }
        local
    }
}
