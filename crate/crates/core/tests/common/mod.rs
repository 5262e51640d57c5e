//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use gearbox_opt::catalog::Catalog;
use gearbox_opt::constraints::{check_all, ConstraintParams};
use gearbox_opt::design::{GearStage, GearboxDesign, Module, Topology, VariableVector};
use gearbox_opt::optimizer::{CostWeights, Problem};

pub const TEETH_MAX: u32 = 60;
pub const PLANETS: [u32; 2] = [2, 3];

pub fn reference_design(topology: Topology) -> GearboxDesign {
    let rows = match topology {
        Topology::Sspg => (([25, 65, 155], 0.5, 3), ([0, 0, 0], 0.0, 0)),
        Topology::Cpg => (([18, 66, 0], 0.6, 3), ([0, 33, 117], 0.6, 3)),
        Topology::Dspg => (([35, 52, 139], 0.5, 3), ([23, 28, 79], 1.0, 3)),
        Topology::Wpg => (([66, 45, 156], 0.5, 6), ([0, 33, 144], 0.5, 6)),
    };
    GearboxDesign::from_rows(topology, rows.0, rows.1).unwrap()
}

/// Motor name and K_mgd each reference design was published with.
pub fn reference_motor(topology: Topology) -> (&'static str, f64) {
    match topology {
        Topology::Sspg => ("MN8014", 1.0),
        _ => ("MAD-M6C12", 1.25),
    }
}

// Mesh efficiencies and train formulas, written out in floating point.

pub fn mesh_ext(k_f: f64, a: u32, b: u32) -> f64 {
    1.0 - k_f * (1.0 / a as f64 + 1.0 / b as f64)
}

pub fn mesh_int(k_f: f64, p: u32, r: u32) -> f64 {
    1.0 - k_f * (1.0 / p as f64 - 1.0 / r as f64)
}

pub fn ratio_f64(d: &GearboxDesign) -> f64 {
    let (s1, s2) = (&d.stage1, &d.stage2);
    let f = |x: u32| x as f64;
    let single = |s: &GearStage| (f(s.sun_teeth) + f(s.ring_teeth)) / f(s.sun_teeth);
    match d.topology {
        Topology::Sspg => single(s1),
        Topology::Dspg => single(s1) * single(s2),
        Topology::Cpg => {
            (f(s1.sun_teeth) + f(s1.planet_teeth)) * (f(s2.planet_teeth) + f(s1.planet_teeth))
                / (f(s1.sun_teeth) * f(s2.planet_teeth))
        }
        Topology::Wpg => {
            let i1 = f(s1.ring_teeth) / f(s1.sun_teeth);
            let i2 = f(s1.ring_teeth) * f(s2.planet_teeth) / (f(s1.planet_teeth) * f(s2.ring_teeth));
            ((1.0 + i1) / (1.0 - i2)).abs()
        }
    }
}

pub fn efficiency_f64(d: &GearboxDesign, k_f: f64) -> f64 {
    let (s1, s2) = (&d.stage1, &d.stage2);
    let f = |x: u32| x as f64;
    let single = |s: &GearStage| {
        let e = mesh_ext(k_f, s.sun_teeth, s.planet_teeth) * mesh_int(k_f, s.planet_teeth, s.ring_teeth);
        (f(s.sun_teeth) + e * f(s.ring_teeth)) / (f(s.sun_teeth) + f(s.ring_teeth))
    };
    match d.topology {
        Topology::Sspg => single(s1),
        Topology::Dspg => single(s1) * single(s2),
        Topology::Cpg => {
            let e = mesh_ext(k_f, s1.sun_teeth, s1.planet_teeth) * mesh_int(k_f, s2.planet_teeth, s2.ring_teeth);
            (f(s1.sun_teeth) * f(s2.planet_teeth) + e * f(s1.planet_teeth) * f(s2.ring_teeth))
                / ((f(s1.sun_teeth) + f(s1.planet_teeth)) * (f(s2.planet_teeth) + f(s1.planet_teeth)))
        }
        Topology::Wpg => {
            let i1 = f(s1.ring_teeth) / f(s1.sun_teeth);
            let i2 = f(s1.ring_teeth) * f(s2.planet_teeth) / (f(s1.planet_teeth) * f(s2.ring_teeth));
            let sp = mesh_ext(k_f, s1.sun_teeth, s1.planet_teeth);
            let pr1 = mesh_int(k_f, s1.planet_teeth, s1.ring_teeth);
            let pr2 = mesh_int(k_f, s2.planet_teeth, s2.ring_teeth);
            pr2 * (pr1 + sp * i1) * (1.0 - i2) / ((1.0 + i1) * (pr1 * pr2 - i2))
        }
    }
}

// Reduced search space and a naive exhaustive optimiser over it.

pub fn reduced_params() -> ConstraintParams {
    let half = Module::from_mm(0.5).unwrap();
    ConstraintParams {
        module_set: vec![half],
        module_min: half,
        module_max: half,
        teeth_max: TEETH_MAX,
        planets_min: PLANETS[0],
        planets_max: PLANETS[1],
        diameter_factor: 1.25,
        ..ConstraintParams::default()
    }
    .with_ratio_bounds(1.0, 1000.0)
}

pub fn reduced_problem(weights: CostWeights) -> Problem {
    Problem::for_motor(&Catalog::builtin(), "MAD-M6C12")
        .unwrap()
        .with_constraints(reduced_params())
        .with_weights(weights)
}

/// Every design of the box set by the problem's bounds (tooth range, module
/// set, planet counts) that passes every constraint family, by nested loops
/// over all variables. Loops skip the closure equalities as soon as they can
/// be tested; everything else is left to the constraint checker.
pub fn naive_feasible(problem: &Problem, topology: Topology) -> Vec<GearboxDesign> {
    let params = problem.constraints();
    let motor = problem.motor();
    let modules = params.allowed_modules();
    let planets = params.planets_min..=params.planets_max;
    let z = params.teeth_min..=params.teeth_max;
    let mut out = Vec::new();
    let mut keep = |d: GearboxDesign| {
        if check_all(&d, motor, params, true).feasible {
            out.push(d);
        }
    };
    let single_stages = |keep_stage: &mut dyn FnMut(GearStage)| {
        for &m in &modules {
            for n in planets.clone() {
                for s in z.clone() {
                    for p in z.clone() {
                        for r in z.clone() {
                            if r != s + 2 * p {
                                continue;
                            }
                            keep_stage(GearStage::new(s, p, r, m, n));
                        }
                    }
                }
            }
        }
    };
    // m_2 N_r2 = m_1 (N_s + N_p1) + m_2 N_p2, in tenths of a millimetre.
    let closes = |m1: Module, m2: Module, s: u32, p1: u32, p2: u32, r2: u32| {
        m2.tenths() * r2 == m1.tenths() * (s + p1) + m2.tenths() * p2
    };
    match topology {
        Topology::Sspg => single_stages(&mut |st| keep(GearboxDesign::sspg(st))),
        Topology::Dspg => {
            let wide = params.clone().with_ratio_bounds(0.0, 1e6);
            let mut stages = Vec::new();
            single_stages(&mut |st| {
                if check_all(&GearboxDesign::sspg(st), motor, &wide, true).feasible {
                    stages.push(st);
                }
            });
            for a in &stages {
                for b in &stages {
                    keep(GearboxDesign::dspg(*a, *b));
                }
            }
        }
        Topology::Cpg => {
            for &m1 in &modules {
                for &m2 in &modules {
                    for n in planets.clone() {
                        for s in z.clone() {
                            for p1 in z.clone() {
                                for p2 in z.clone() {
                                    for r2 in z.clone() {
                                        if !closes(m1, m2, s, p1, p2, r2) {
                                            continue;
                                        }
                                        keep(GearboxDesign::cpg(s, p1, p2, r2, m1, m2, n));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Topology::Wpg => {
            for &m1 in &modules {
                for &m2 in &modules {
                    for n in planets.clone() {
                        for s in z.clone() {
                            for p1 in z.clone() {
                                for r1 in z.clone() {
                                    if r1 != s + 2 * p1 {
                                        continue;
                                    }
                                    for p2 in z.clone() {
                                        for r2 in z.clone() {
                                            if !closes(m1, m2, s, p1, p2, r2) {
                                                continue;
                                            }
                                            keep(GearboxDesign::wpg(s, p1, r1, p2, r2, m1, m2, n));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Raw metrics of one feasible design.
#[derive(Debug, Clone, Copy)]
pub struct Metrics {
    pub design: GearboxDesign,
    pub x: VariableVector,
    pub mass: f64,
    pub efficiency: f64,
    pub width: f64,
    pub ratio: f64,
}

/// Metrics of every feasible design the evaluator accepts.
pub fn metrics(problem: &Problem, designs: &[GearboxDesign]) -> Vec<Metrics> {
    designs
        .iter()
        .filter_map(|d| {
            let e = problem.evaluate(d).ok()?;
            Some(Metrics {
                design: *d,
                x: d.variables(),
                mass: e.mass.total,
                efficiency: e.efficiency,
                width: e.width.actuator_width,
                ratio: e.ratio.value,
            })
        })
        .collect()
}

pub fn oracle_cost(w: &CostWeights, m: &Metrics) -> f64 {
    let dev = match w.gr_req {
        Some(t) => w.k_g * (t - m.ratio).abs(),
        None => 0.0,
    };
    w.k_m * m.mass - w.k_e * m.efficiency + w.k_w * m.width + dev
}

/// Minimum by `key`, ties broken by the lexicographically smallest design vector.
pub fn argmin(set: &[Metrics], key: impl Fn(&Metrics) -> f64) -> Option<(f64, Metrics)> {
    set.iter()
        .map(|m| (key(m), *m))
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.x.cmp(&b.1.x)))
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Problem over the full default space with loose ratio bounds.
pub fn wide_problem() -> Problem {
    Problem::for_motor(&Catalog::builtin(), "MAD-M6C12")
        .unwrap()
        .with_diameter_factor(1.25)
        .with_ratio_range(1.0, 1000.0)
}

/// `per_topology` random designs of each layout that pass every constraint
/// family of `wide_problem` and that the evaluator accepts.
pub fn random_feasible(per_topology: usize, seed: u64) -> Vec<GearboxDesign> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let problem = wide_problem();
    let (motor, params) = (problem.motor(), problem.constraints());
    let mut out = Vec::new();
    let accept = |d: &GearboxDesign| problem.evaluate(d).is_ok();
    for t in [Topology::Sspg, Topology::Cpg, Topology::Wpg] {
        let all: Vec<GearboxDesign> = gearbox_opt::optimizer::enumerate_designs(motor, params, t)
            .into_iter()
            .filter(accept)
            .collect();
        out.extend(all.choose_multiple(&mut rng, per_topology).copied());
    }
    let stages: Vec<GearStage> = gearbox_opt::optimizer::enumerate_designs(motor, params, Topology::Sspg)
        .into_iter()
        .map(|d| d.stage1)
        .collect();
    let mut pairs = 0;
    while pairs < per_topology {
        let d = GearboxDesign::dspg(*stages.choose(&mut rng).unwrap(), *stages.choose(&mut rng).unwrap());
        if gearbox_opt::constraints::is_feasible(&d, motor, params) && accept(&d) {
            out.push(d);
            pairs += 1;
        }
    }
    out
}

// Mass-model invariants.

fn faces(p: &Problem, d: &GearboxDesign) -> [f64; 2] {
    gearbox_opt::sizing::stage_face_widths(d, p.motor(), p.sizing()).unwrap()
}

fn scope_with(p: &Problem, d: &GearboxDesign, f: [f64; 2]) -> gearbox_opt::scope::Scope {
    let (gearbox, _) = gearbox_opt::sizing::stack_widths(d.topology, f, p.motor(), p.sizing());
    p.base_scope().with_design(d, f, gearbox)
}

fn total(p: &Problem, d: &GearboxDesign, f: [f64; 2]) -> f64 {
    p.mass_model().breakdown(&scope_with(p, d, f), false, p.motor().mass).unwrap().total
}

fn bump_teeth(d: &GearboxDesign, which: usize) -> Option<GearboxDesign> {
    let mut out = *d;
    let stage = if which < 3 { &mut out.stage1 } else { &mut out.stage2 };
    let z = match which % 3 {
        0 => &mut stage.sun_teeth,
        1 => &mut stage.planet_teeth,
        _ => &mut stage.ring_teeth,
    };
    if *z == 0 {
        return None;
    }
    *z += 1;
    Some(out)
}

pub fn per_planet_part(name: &str) -> bool {
    ["planets_", "planet_bearings_", "planet_pins_", "carrier_extrusions_"]
        .iter()
        .any(|p| name.starts_with(p))
}

/// Total equals the part sum plus the motor, parts are non-negative and the
/// grouped gearbox sum agrees with the breakdown.
pub fn check_additivity(p: &Problem, d: &GearboxDesign) -> Result<(), String> {
    let e = p.evaluate(d).map_err(|e| e.to_string())?;
    let sum: f64 = e.mass.per_component.values().sum();
    if e.mass.total != sum + e.mass.motor_mass {
        return Err(format!("{d}: total {} != parts {sum} + motor", e.mass.total));
    }
    if let Some((k, v)) = e.mass.per_component.iter().find(|(_, v)| !(**v >= 0.0)) {
        return Err(format!("{d}: {k} = {v}"));
    }
    let grouped = p.mass_model().gearbox_mass(&p.scope(d).unwrap(), false).unwrap();
    if !close(grouped, e.mass.gearbox_mass, 1e-12) {
        return Err(format!("{d}: grouped {grouped} vs {}", e.mass.gearbox_mass));
    }
    Ok(())
}

/// Total mass does not drop when a face width, a tooth count or the module grows.
pub fn check_monotonicity(p: &Problem, d: &GearboxDesign) -> Result<(), String> {
    let f = faces(p, d);
    let base = total(p, d, f);
    for (i, grow) in [[1.0, 0.0], [0.0, 1.0]].iter().enumerate() {
        if total(p, d, [f[0] + grow[0], f[1] + grow[1]]) < base {
            return Err(format!("{d}: face width {} grew, mass fell", i + 1));
        }
    }
    for which in 0..6 {
        if let Some(b) = bump_teeth(d, which) {
            if total(p, &b, f) < base {
                return Err(format!("{d}: tooth count {which} grew, mass fell"));
            }
        }
    }
    let next = |m: Module| Module::from_tenths(m.tenths() + 1);
    let mut m = *d;
    m.stage1.module = next(m.stage1.module);
    if !m.stage2.module.is_zero() {
        m.stage2.module = next(m.stage2.module);
    }
    if total(p, &m, f) < base {
        return Err(format!("{d}: module grew, mass fell"));
    }
    Ok(())
}

/// One more planet adds exactly one planet, bearing, pin and carrier boss.
pub fn check_planet_multiplicity(p: &Problem, d: &GearboxDesign) -> Result<(), String> {
    let f = faces(p, d);
    let mut more = *d;
    more.stage1.planet_count += 1;
    if d.topology != Topology::Sspg {
        more.stage2.planet_count += 1;
    }
    let a = p.mass_model().breakdown(&scope_with(p, d, f), false, 0.0).unwrap();
    let b = p.mass_model().breakdown(&scope_with(p, &more, f), false, 0.0).unwrap();
    let mut expected = 0.0;
    for (name, mass) in &a.per_component {
        if per_planet_part(name) {
            let stage = if name.ends_with('2') { &d.stage2 } else { &d.stage1 };
            expected += mass / stage.planet_count as f64;
        } else if b.per_component[name] != *mass {
            return Err(format!("{d}: {name} depends on the planet count"));
        }
    }
    let delta = b.gearbox_mass - a.gearbox_mass;
    if !close(delta, expected, 1e-9) {
        return Err(format!("{d}: one more planet adds {delta} kg, expected {expected} kg"));
    }
    Ok(())
}
