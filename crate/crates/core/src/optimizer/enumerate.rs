//! Constraint-driven candidate generation for the single-pass layouts.
//!
//! Ring teeth are derived from the closure conditions, loops stop as soon as
//! the monotone diameter or tooth bounds fail, and every surviving candidate
//! goes through the full feasibility check before it is emitted.

use crate::catalog::MotorSpec;
use crate::constraints::{interference_margin, is_feasible, ConstraintParams};
use crate::design::{GearStage, GearboxDesign, Module, Topology};

use super::{run_partitions, Local, Problem, SearchOptions};

/// Loose slack for loop cut-offs; the exact test happens in `is_feasible`.
const SLACK: f64 = 1e-6;

pub(crate) struct Space<'a> {
    pub motor: &'a MotorSpec,
    pub params: &'a ConstraintParams,
    pub modules: Vec<Module>,
    pub limit: f64,
    ratio_lo: f64,
    ratio_hi: f64,
}

impl<'a> Space<'a> {
    pub fn new(motor: &'a MotorSpec, params: &'a ConstraintParams) -> Self {
        Space {
            motor,
            params,
            modules: params.allowed_modules(),
            limit: params.max_diameter(motor),
            ratio_lo: params.gr_min * (1.0 - 1e-9),
            ratio_hi: params.gr_max * (1.0 + 1e-9),
        }
    }

    pub fn keys(&self) -> Vec<(Module, u32)> {
        let mut keys = Vec::new();
        for &m in &self.modules {
            for n in self.params.planets_min..=self.params.planets_max {
                keys.push((m, n));
            }
        }
        keys
    }

    fn tmin(&self) -> u32 {
        self.params.teeth_min.max(1)
    }

    fn tmax(&self) -> u32 {
        self.params.teeth_max
    }

    fn ring_fits(&self, m: Module, ring_teeth: u32) -> bool {
        m.mm() * ring_teeth as f64 + self.params.ring_radial_width <= self.limit + SLACK
    }

    fn ratio_may_fit(&self, g: f64) -> bool {
        g >= self.ratio_lo && g <= self.ratio_hi
    }

    fn clears(&self, stage: &GearStage) -> bool {
        interference_margin(stage, self.params) >= self.params.min_clearance
    }

    /// Single stages of module `m` with `n` planets in generation order.
    /// The ratio is not checked here.
    pub fn visit_stages(&self, m: Module, n: u32, f: &mut impl FnMut(GearStage)) {
        let (tmin, tmax) = (self.tmin(), self.tmax());
        for ns in tmin..=tmax {
            if ns + 2 * tmin > tmax || !self.ring_fits(m, ns + 2 * tmin) {
                break;
            }
            for np in tmin..=tmax {
                let nr = ns + 2 * np;
                if nr > tmax || !self.ring_fits(m, nr) {
                    break;
                }
                if (ns + nr) % n != 0 {
                    continue;
                }
                let s = GearStage::new(ns, np, nr, m, n);
                if self.clears(&s) {
                    f(s);
                }
            }
        }
    }

    /// Feasible designs of one partition in generation order; returns the
    /// number of candidates handed to the full check.
    pub fn visit(&self, topology: Topology, key: (Module, u32), f: &mut impl FnMut(GearboxDesign)) -> u64 {
        let mut examined = 0;
        let mut emit = |d: GearboxDesign| {
            examined += 1;
            if is_feasible(&d, self.motor, self.params) {
                f(d);
            }
        };
        let (m, n) = key;
        match topology {
            Topology::Sspg => self.visit_stages(m, n, &mut |s| {
                if self.ratio_may_fit((s.sun_teeth + s.ring_teeth) as f64 / s.sun_teeth as f64) {
                    emit(GearboxDesign::sspg(s));
                }
            }),
            Topology::Cpg => self.visit_cpg(m, n, &mut emit),
            Topology::Wpg => self.visit_wpg(m, n, &mut emit),
            Topology::Dspg => panic!("series layouts are enumerated pairwise"),
        }
        examined
    }

    fn visit_cpg(&self, m: Module, n: u32, emit: &mut impl FnMut(GearboxDesign)) {
        let (tmin, tmax) = (self.tmin(), self.tmax());
        let envelope_fits = |z: u32| m.mm() * z as f64 <= self.limit + SLACK;
        for ns in tmin..=tmax {
            if !envelope_fits(ns + 2 * tmin) || ns + tmin + tmin > tmax {
                break;
            }
            if ns % n != 0 {
                continue;
            }
            for np1 in tmin..=tmax {
                if !envelope_fits(ns + 2 * np1) || ns + np1 + tmin > tmax {
                    break;
                }
                if !self.clears(&GearStage::new(ns, np1, 0, m, n)) {
                    continue;
                }
                for np2 in tmin..=tmax {
                    let nr2 = ns + np1 + np2;
                    if nr2 > tmax {
                        break;
                    }
                    if nr2 % n != 0 {
                        continue;
                    }
                    let g = ((ns + np1) as f64 * (np2 + np1) as f64) / (ns as f64 * np2 as f64);
                    if self.ratio_may_fit(g) {
                        emit(GearboxDesign::cpg(ns, np1, np2, nr2, m, m, n));
                    }
                }
            }
        }
    }

    fn visit_wpg(&self, m1: Module, n: u32, emit: &mut impl FnMut(GearboxDesign)) {
        let (tmin, tmax) = (self.tmin(), self.tmax());
        for &m2 in &self.modules {
            for ns in tmin..=tmax {
                if ns + 2 * tmin > tmax || !self.ring_fits(m1, ns + 2 * tmin) {
                    break;
                }
                if ns % n != 0 {
                    continue;
                }
                for np1 in tmin..=tmax {
                    let nr1 = ns + 2 * np1;
                    if nr1 > tmax || !self.ring_fits(m1, nr1) {
                        break;
                    }
                    if nr1 % n != 0 || !self.clears(&GearStage::new(ns, np1, nr1, m1, n)) {
                        continue;
                    }
                    let pitch = m1.tenths() * (ns + np1);
                    if pitch % m2.tenths() != 0 {
                        continue;
                    }
                    let offset = pitch / m2.tenths();
                    for np2 in tmin..=tmax {
                        let nr2 = offset + np2;
                        if nr2 > tmax || !self.ring_fits(m2, nr2) {
                            break;
                        }
                        if nr2 % n != 0 || nr1 * np2 == np1 * nr2 {
                            continue;
                        }
                        let i1 = nr1 as f64 / ns as f64;
                        let i2 = (nr1 as f64 * np2 as f64) / (np1 as f64 * nr2 as f64);
                        if self.ratio_may_fit(((1.0 + i1) / (1.0 - i2)).abs()) {
                            emit(GearboxDesign::wpg(ns, np1, nr1, np2, nr2, m1, m2, n));
                        }
                    }
                }
            }
        }
    }
}

/// Every design of `topology` that satisfies all constraint families, in a
/// fixed order.
pub fn enumerate_designs(motor: &MotorSpec, params: &ConstraintParams, topology: Topology) -> Vec<GearboxDesign> {
    let space = Space::new(motor, params);
    let mut out = Vec::new();
    if topology == Topology::Dspg {
        super::dspg::visit_pairs(&space, &mut |d| out.push(d));
        return out;
    }
    for key in space.keys() {
        space.visit(topology, key, &mut |d| out.push(d));
    }
    out
}

pub(crate) fn search(problem: &Problem, topology: Topology, options: &SearchOptions) -> Local {
    let space = Space::new(problem.motor(), problem.constraints());
    let keys = space.keys();
    run_partitions(&keys, options, |&key| {
        let mut local = Local::default();
        local.stats.partitions = 1;
        let mut found = Vec::new();
        local.stats.examined = space.visit(topology, key, &mut |d| found.push(d));
        for d in found {
            local.stats.feasible += 1;
            match problem.score(&d) {
                Some(s) => {
                    local.stats.evaluated += 1;
                    local.offer(s.cost, d);
                }
                None => local.stats.rejected += 1,
            }
        }
        local
    })
}
