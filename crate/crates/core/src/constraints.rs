//! Feasibility checks, grouped into six families:
//! I ratio bounds, II geometric closure, III equal planet spacing,
//! IV neighbour clearance, V outer diameter, VI variable bounds.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::catalog::MotorSpec;
use crate::design::{GearStage, GearboxDesign, Module, Topology};
use crate::kinematics::gear_ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintFamily {
    /// Zero pattern of the variable vector does not match the topology.
    Layout,
    GearRatio,
    Geometric,
    Meshing,
    Interference,
    MaxDiameter,
    Bounds,
}

impl ConstraintFamily {
    pub fn numeral(self) -> &'static str {
        match self {
            ConstraintFamily::Layout => "-",
            ConstraintFamily::GearRatio => "I",
            ConstraintFamily::Geometric => "II",
            ConstraintFamily::Meshing => "III",
            ConstraintFamily::Interference => "IV",
            ConstraintFamily::MaxDiameter => "V",
            ConstraintFamily::Bounds => "VI",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstraintFamily::Layout => "layout",
            ConstraintFamily::GearRatio => "gear ratio",
            ConstraintFamily::Geometric => "geometric",
            ConstraintFamily::Meshing => "meshing",
            ConstraintFamily::Interference => "interference",
            ConstraintFamily::MaxDiameter => "max diameter",
            ConstraintFamily::Bounds => "bounds",
        }
    }
}

impl fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.numeral(), self.name())
    }
}

/// Which neighbour-clearance formula to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterferenceRule {
    /// `2 (R_s + R_p) sin(π / (2 n_p)) - R_p - R_ce >= δ_ce`.
    #[default]
    Verbatim,
    /// Same with `sin(π / n_p)`, the chord between adjacent planet centres.
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintParams {
    pub gr_min: f64,
    pub gr_max: f64,
    /// R_ce, mm.
    pub carrier_extrusion_radius: f64,
    /// δ_ce, mm.
    pub min_clearance: f64,
    /// δ_rw, mm.
    pub ring_radial_width: f64,
    /// K_mgd.
    pub diameter_factor: f64,
    pub module_set: Vec<Module>,
    pub module_min: Module,
    pub module_max: Module,
    pub teeth_min: u32,
    /// Upper tooth bound; keeps the search finite when the diameter bound is loose.
    pub teeth_max: u32,
    pub planets_min: u32,
    pub planets_max: u32,
    pub interference: InterferenceRule,
    /// Enforce `m_2 N_r2 > m_1 N_r1` for Wolfrom trains.
    pub wolfrom_strict_ring: bool,
}

impl Default for ConstraintParams {
    fn default() -> Self {
        ConstraintParams {
            gr_min: 1.0,
            gr_max: 1000.0,
            carrier_extrusion_radius: 4.0,
            min_clearance: 1.0,
            ring_radial_width: 5.0,
            diameter_factor: 1.0,
            module_set: [5, 6, 8, 10, 12].map(Module::from_tenths).to_vec(),
            module_min: Module::from_tenths(5),
            module_max: Module::from_tenths(12),
            teeth_min: 18,
            teeth_max: 200,
            planets_min: 2,
            planets_max: 7,
            interference: InterferenceRule::Verbatim,
            wolfrom_strict_ring: true,
        }
    }
}

/// Decimal ratio bound as an exact rational, at micro resolution.
pub fn decimal_ratio(x: f64) -> Ratio<i64> {
    Ratio::new((x * 1e6).round() as i64, 1_000_000)
}

impl ConstraintParams {
    pub fn with_ratio_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.gr_min = lo;
        self.gr_max = hi;
        self
    }

    pub fn with_diameter_factor(mut self, k: f64) -> Self {
        self.diameter_factor = k;
        self
    }

    pub fn ratio_bounds(&self) -> (Ratio<i64>, Ratio<i64>) {
        (decimal_ratio(self.gr_min), decimal_ratio(self.gr_max))
    }

    pub fn max_diameter(&self, motor: &MotorSpec) -> f64 {
        self.diameter_factor * motor.outer_diameter
    }

    /// Modules of the set that also lie inside `[module_min, module_max]`, ascending.
    pub fn allowed_modules(&self) -> Vec<Module> {
        let mut v: Vec<Module> = self
            .module_set
            .iter()
            .copied()
            .filter(|m| *m >= self.module_min && *m <= self.module_max)
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.gr_min.is_finite() && self.gr_max.is_finite() && self.gr_min < self.gr_max) {
            return Err(format!("gr_min ({}) must be below gr_max ({})", self.gr_min, self.gr_max));
        }
        if self.module_set.is_empty() {
            return Err("module_set is empty".into());
        }
        if self.module_set.windows(2).any(|w| w[0] >= w[1]) {
            return Err("module_set must be strictly ascending".into());
        }
        if self.teeth_min < 18 {
            return Err(format!("teeth_min = {} is below 18", self.teeth_min));
        }
        if self.teeth_max < self.teeth_min {
            return Err("teeth_max is below teeth_min".into());
        }
        if self.planets_min < 1 || self.planets_min > self.planets_max {
            return Err("planet count range is empty".into());
        }
        for (name, v) in [
            ("carrier_extrusion_radius", self.carrier_extrusion_radius),
            ("min_clearance", self.min_clearance),
            ("ring_radial_width", self.ring_radial_width),
            ("diameter_factor", self.diameter_factor),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} = {v} must be non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub family: ConstraintFamily,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.family, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn families(&self) -> Vec<ConstraintFamily> {
        let mut v: Vec<_> = self.violations.iter().map(|x| x.family).collect();
        v.dedup();
        v
    }

    pub fn violates(&self, family: ConstraintFamily) -> bool {
        self.violations.iter().any(|v| v.family == family)
    }
}

/// Receives violations. Returns `false` to stop checking.
trait Sink {
    fn report(&mut self, family: ConstraintFamily, detail: impl FnOnce() -> String) -> bool;
}

struct Collect {
    violations: Vec<Violation>,
    short_circuit: bool,
}

impl Sink for Collect {
    fn report(&mut self, family: ConstraintFamily, detail: impl FnOnce() -> String) -> bool {
        self.violations.push(Violation { family, detail: detail() });
        !self.short_circuit
    }
}

struct FirstFailure(bool);

impl Sink for FirstFailure {
    fn report(&mut self, _: ConstraintFamily, _: impl FnOnce() -> String) -> bool {
        self.0 = true;
        false
    }
}

/// Runs `$check`; bails out of the enclosing function when the sink asks to stop.
macro_rules! check {
    ($sink:expr, $cond:expr, $family:expr, $($fmt:tt)+) => {
        if !$cond && !$sink.report($family, || format!($($fmt)+)) {
            return false;
        }
    };
}

fn active_stages(design: &GearboxDesign) -> &'static [usize] {
    match design.topology {
        Topology::Sspg => &[1],
        _ => &[1, 2],
    }
}

fn ratio_family(design: &GearboxDesign, params: &ConstraintParams, sink: &mut impl Sink) -> bool {
    let (lo, hi) = params.ratio_bounds();
    match gear_ratio(design) {
        Ok(r) => {
            check!(
                sink,
                r.exact >= lo && r.exact <= hi,
                ConstraintFamily::GearRatio,
                "ratio {} ({:.6}) outside [{}, {}]",
                r.exact,
                r.value,
                params.gr_min,
                params.gr_max
            );
        }
        Err(e) => {
            check!(sink, false, ConstraintFamily::GearRatio, "{e}");
        }
    }
    true
}

fn closes(stage: &GearStage) -> bool {
    stage.ring_teeth == stage.sun_teeth + 2 * stage.planet_teeth
}

fn geometric_family(design: &GearboxDesign, params: &ConstraintParams, sink: &mut impl Sink) -> bool {
    let (s1, s2) = (&design.stage1, &design.stage2);
    let family = ConstraintFamily::Geometric;
    match design.topology {
        Topology::Sspg | Topology::Dspg => {
            for &i in active_stages(design) {
                let s = design.stage(i);
                check!(
                    sink,
                    closes(s),
                    family,
                    "stage {i}: N_r = {} but N_s + 2 N_p = {}",
                    s.ring_teeth,
                    s.sun_teeth + 2 * s.planet_teeth
                );
            }
        }
        Topology::Cpg | Topology::Wpg => {
            if design.topology == Topology::Wpg {
                check!(
                    sink,
                    closes(s1),
                    family,
                    "stage 1: N_r1 = {} but N_s1 + 2 N_p1 = {}",
                    s1.ring_teeth,
                    s1.sun_teeth + 2 * s1.planet_teeth
                );
            }
            let outer = s2.pitch_tenths(s2.ring_teeth);
            let inner = s1.pitch_tenths(s1.sun_teeth + s1.planet_teeth) + s2.pitch_tenths(s2.planet_teeth);
            check!(
                sink,
                outer == inner,
                family,
                "m_2 N_r2 = {:.1} mm but m_1 (N_s1 + N_p1) + m_2 N_p2 = {:.1} mm",
                outer as f64 / 10.0,
                inner as f64 / 10.0
            );
            if design.topology == Topology::Cpg {
                check!(
                    sink,
                    s1.module == s2.module,
                    family,
                    "stepped planets need m_1 = m_2 (got {} and {})",
                    s1.module,
                    s2.module
                );
            } else if params.wolfrom_strict_ring {
                let ring1 = s1.pitch_tenths(s1.ring_teeth);
                check!(
                    sink,
                    outer > ring1,
                    family,
                    "m_2 N_r2 = {:.1} mm is not greater than m_1 N_r1 = {:.1} mm",
                    outer as f64 / 10.0,
                    ring1 as f64 / 10.0
                );
            }
        }
    }
    true
}

fn meshing_family(design: &GearboxDesign, sink: &mut impl Sink) -> bool {
    let (s1, s2) = (&design.stage1, &design.stage2);
    let family = ConstraintFamily::Meshing;
    let n = s1.planet_count;
    match design.topology {
        Topology::Sspg | Topology::Dspg => {
            for &i in active_stages(design) {
                let s = design.stage(i);
                check!(
                    sink,
                    (s.sun_teeth + s.ring_teeth) % s.planet_count == 0,
                    family,
                    "stage {i}: (N_s + N_r) = {} not divisible by n_p = {}",
                    s.sun_teeth + s.ring_teeth,
                    s.planet_count
                );
            }
        }
        Topology::Cpg | Topology::Wpg => {
            check!(sink, s1.sun_teeth % n == 0, family, "N_s1 = {} not divisible by n_p = {n}", s1.sun_teeth);
            if design.topology == Topology::Wpg {
                check!(sink, s1.ring_teeth % n == 0, family, "N_r1 = {} not divisible by n_p = {n}", s1.ring_teeth);
            }
            check!(sink, s2.ring_teeth % n == 0, family, "N_r2 = {} not divisible by n_p = {n}", s2.ring_teeth);
        }
    }
    true
}

/// Left-hand side of the neighbour-clearance inequality for one stage, in mm.
pub fn interference_margin(stage: &GearStage, params: &ConstraintParams) -> f64 {
    let rs = stage.pitch_diameter(stage.sun_teeth) / 2.0;
    let rp = stage.pitch_diameter(stage.planet_teeth) / 2.0;
    let divisor = match params.interference {
        InterferenceRule::Verbatim => 2.0,
        InterferenceRule::Classical => 1.0,
    };
    let angle = std::f64::consts::PI / (divisor * stage.planet_count as f64);
    2.0 * (rs + rp) * angle.sin() - rp - params.carrier_extrusion_radius
}

fn interference_family(design: &GearboxDesign, params: &ConstraintParams, sink: &mut impl Sink) -> bool {
    let stages: &[usize] = match design.topology {
        Topology::Sspg | Topology::Cpg | Topology::Wpg => &[1],
        Topology::Dspg => &[1, 2],
    };
    for &i in stages {
        let margin = interference_margin(design.stage(i), params);
        check!(
            sink,
            margin >= params.min_clearance,
            ConstraintFamily::Interference,
            "stage {i}: clearance {margin:.3} mm < {} mm",
            params.min_clearance
        );
    }
    true
}

/// Outer diameters the max-diameter family compares against `K_mgd D_motor`, in mm.
pub fn constrained_diameters(design: &GearboxDesign, params: &ConstraintParams) -> Vec<(usize, f64)> {
    let (s1, s2) = (&design.stage1, &design.stage2);
    let ring = |s: &GearStage| s.pitch_diameter(s.ring_teeth) + params.ring_radial_width;
    match design.topology {
        Topology::Sspg => vec![(1, ring(s1))],
        Topology::Dspg | Topology::Wpg => vec![(1, ring(s1)), (2, ring(s2))],
        Topology::Cpg => vec![(1, s1.pitch_diameter(s1.sun_teeth + 2 * s1.planet_teeth))],
    }
}

fn diameter_family(design: &GearboxDesign, motor: &MotorSpec, params: &ConstraintParams, sink: &mut impl Sink) -> bool {
    let limit = params.max_diameter(motor);
    for (i, d) in constrained_diameters(design, params) {
        check!(
            sink,
            d <= limit + 1e-9,
            ConstraintFamily::MaxDiameter,
            "stage {i}: {d:.3} mm exceeds K_mgd D_motor = {limit:.3} mm"
        );
    }
    true
}

fn bounds_family(design: &GearboxDesign, params: &ConstraintParams, sink: &mut impl Sink) -> bool {
    let family = ConstraintFamily::Bounds;
    for &i in active_stages(design) {
        let s = design.stage(i);
        for (label, z) in [("N_s", s.sun_teeth), ("N_p", s.planet_teeth), ("N_r", s.ring_teeth)] {
            if z == 0 {
                continue;
            }
            check!(sink, z >= params.teeth_min, family, "{label}{i} = {z} < {}", params.teeth_min);
            check!(sink, z <= params.teeth_max, family, "{label}{i} = {z} > {}", params.teeth_max);
        }
        let m = s.module;
        check!(
            sink,
            m >= params.module_min && m <= params.module_max && params.module_set.contains(&m),
            family,
            "module_{i} = {m} mm not in the allowed set"
        );
        let n = s.planet_count;
        check!(
            sink,
            (params.planets_min..=params.planets_max).contains(&n),
            family,
            "n_p{i} = {n} outside [{}, {}]",
            params.planets_min,
            params.planets_max
        );
    }
    true
}

fn run(design: &GearboxDesign, motor: &MotorSpec, params: &ConstraintParams, sink: &mut impl Sink) {
    // Later families assume a well-formed layout.
    if let Err(e) = design.validate() {
        sink.report(ConstraintFamily::Layout, || e.to_string());
        return;
    }
    let _ = ratio_family(design, params, sink)
        && geometric_family(design, params, sink)
        && meshing_family(design, sink)
        && interference_family(design, params, sink)
        && diameter_family(design, motor, params, sink)
        && bounds_family(design, params, sink);
}

pub fn check_gear_ratio(design: &GearboxDesign, params: &ConstraintParams) -> Result<(), Violation> {
    single(|s| ratio_family(design, params, s))
}

pub fn check_geometric(design: &GearboxDesign, params: &ConstraintParams) -> Result<(), Violation> {
    single(|s| geometric_family(design, params, s))
}

pub fn check_meshing(design: &GearboxDesign) -> Result<(), Violation> {
    single(|s| meshing_family(design, s))
}

pub fn check_interference(design: &GearboxDesign, params: &ConstraintParams) -> Result<(), Violation> {
    single(|s| interference_family(design, params, s))
}

pub fn check_max_diameter(design: &GearboxDesign, motor: &MotorSpec, params: &ConstraintParams) -> Result<(), Violation> {
    single(|s| diameter_family(design, motor, params, s))
}

pub fn check_bounds(design: &GearboxDesign, params: &ConstraintParams) -> Result<(), Violation> {
    single(|s| bounds_family(design, params, s))
}

fn single(f: impl FnOnce(&mut Collect) -> bool) -> Result<(), Violation> {
    let mut sink = Collect {
        violations: Vec::new(),
        short_circuit: true,
    };
    f(&mut sink);
    match sink.violations.into_iter().next() {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

/// Full report. With `short_circuit` the first violation ends the check.
pub fn check_all(design: &GearboxDesign, motor: &MotorSpec, params: &ConstraintParams, short_circuit: bool) -> FeasibilityReport {
    let mut sink = Collect {
        violations: Vec::new(),
        short_circuit,
    };
    run(design, motor, params, &mut sink);
    FeasibilityReport {
        feasible: sink.violations.is_empty(),
        violations: sink.violations,
    }
}

/// Allocation-free verdict for the search loop.
pub fn is_feasible(design: &GearboxDesign, motor: &MotorSpec, params: &ConstraintParams) -> bool {
    let mut sink = FirstFailure(false);
    run(design, motor, params, &mut sink);
    !sink.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;

    fn m(t: u32) -> Module {
        Module::from_tenths(t)
    }

    fn sspg(n: u32) -> GearboxDesign {
        GearboxDesign::sspg(GearStage::new(25, 65, 155, m(5), n))
    }

    #[test]
    fn sspg_meshing_and_interference_examples() {
        let p = ConstraintParams::default();
        assert!(check_meshing(&sspg(3)).is_ok());
        assert!(check_meshing(&sspg(7)).is_err());
        assert!((interference_margin(&sspg(3).stage1, &p) - 2.25).abs() < 1e-12);
        assert!(check_interference(&sspg(7), &p).is_err());
    }

    #[test]
    fn ring_off_by_one_is_geometric_violation() {
        let d = GearboxDesign::sspg(GearStage::new(25, 65, 154, m(5), 3));
        let err = check_geometric(&d, &ConstraintParams::default()).unwrap_err();
        assert_eq!(err.family, ConstraintFamily::Geometric);
    }

    #[test]
    fn bounds_catch_small_sun_and_many_planets() {
        let p = ConstraintParams::default();
        let small = GearboxDesign::sspg(GearStage::new(17, 65, 147, m(5), 3));
        assert!(check_bounds(&small, &p).is_err());
        assert!(check_bounds(&sspg(8), &p).is_err());
        assert!(check_bounds(&sspg(3), &p).is_ok());
    }

    #[test]
    fn short_circuit_agrees_with_full_report() {
        let catalog = Catalog::builtin();
        let motor = catalog.motor("MN8014").unwrap();
        let p = ConstraintParams::default().with_ratio_bounds(8.0, 9.0);
        let d = GearboxDesign::sspg(GearStage::new(17, 65, 154, m(5), 8));
        let full = check_all(&d, motor, &p, false);
        let short = check_all(&d, motor, &p, true);
        assert!(!full.feasible && !short.feasible && !is_feasible(&d, motor, &p));
        assert_eq!(short.violations.len(), 1);
        assert!(full.violations.len() > 1);
        assert_eq!(full.violations[0], short.violations[0]);
    }

    #[test]
    fn malformed_layout_stops_early() {
        let catalog = Catalog::builtin();
        let motor = catalog.motor("MN8014").unwrap();
        let mut d = sspg(3);
        d.stage2.sun_teeth = 20;
        let r = check_all(&d, motor, &ConstraintParams::default(), false);
        assert_eq!(r.families(), vec![ConstraintFamily::Layout]);
    }
}
