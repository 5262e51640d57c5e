//! Named dimensions of an actuator: the ten optimization variables, fixed
//! dimensions taken from the motor and parameters, and dependent dimensions
//! derived from both. Mass templates and the CAD variable file read the same
//! registry.

use serde::{Deserialize, Serialize};

use crate::catalog::MotorSpec;
use crate::constraints::ConstraintParams;
use crate::design::{GearStage, GearboxDesign, Topology};
use crate::sizing::SizingParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Optimization,
    Fixed,
    Dependent,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Optimization, Group::Fixed, Group::Dependent];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Optimization => "optimization",
            Group::Fixed => "fixed",
            Group::Dependent => "dependent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Mm,
    Deg,
    Count,
    Dimensionless,
    Nm,
    Mpa,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Mm => "mm",
            Unit::Deg => "deg",
            Unit::Count => "count",
            Unit::Dimensionless => "dimensionless",
            Unit::Nm => "Nm",
            Unit::Mpa => "MPa",
        }
    }

    pub fn parse(s: &str) -> Option<Unit> {
        Some(match s {
            "mm" => Unit::Mm,
            "deg" => Unit::Deg,
            "count" => Unit::Count,
            "dimensionless" => Unit::Dimensionless,
            "Nm" => Unit::Nm,
            "MPa" => Unit::Mpa,
            _ => return None,
        })
    }

    /// Decimal places used when the value is written out.
    pub fn decimals(self) -> usize {
        match self {
            Unit::Count => 0,
            Unit::Dimensionless => 6,
            _ => 3,
        }
    }
}

/// What a symbol's value depends on, used to split a two-stage mass into
/// parts that can be bounded separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dependence {
    Const,
    Stage1,
    Stage2,
    Global,
}

impl Dependence {
    pub fn join(self, other: Dependence) -> Dependence {
        use Dependence::*;
        match (self, other) {
            (Const, x) | (x, Const) => x,
            (a, b) if a == b => a,
            _ => Global,
        }
    }
}

macro_rules! symbols {
    ($( $variant:ident => $name:literal, $group:ident, $unit:ident, $dep:ident; )*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Sym { $($variant),* }

        impl Sym {
            pub const ALL: &'static [Sym] = &[$(Sym::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(Sym::$variant => $name),* }
            }

            pub fn group(self) -> Group {
                match self { $(Sym::$variant => Group::$group),* }
            }

            pub fn unit(self) -> Unit {
                match self { $(Sym::$variant => Unit::$unit),* }
            }

            pub fn dependence(self) -> Dependence {
                match self { $(Sym::$variant => Dependence::$dep),* }
            }
        }
    };
}

symbols! {
    Ns1 => "N_s1", Optimization, Count, Stage1;
    Np1 => "N_p1", Optimization, Count, Stage1;
    Nr1 => "N_r1", Optimization, Count, Stage1;
    Ns2 => "N_s2", Optimization, Count, Stage2;
    Np2 => "N_p2", Optimization, Count, Stage2;
    Nr2 => "N_r2", Optimization, Count, Stage2;
    Module1 => "module_1", Optimization, Mm, Stage1;
    Module2 => "module_2", Optimization, Mm, Stage2;
    Planets1 => "n_p1", Optimization, Count, Stage1;
    Planets2 => "n_p2", Optimization, Count, Stage2;

    MotorOd => "motor_od", Fixed, Mm, Const;
    MotorStack => "motor_stack", Fixed, Mm, Const;
    MotorShaftD => "motor_shaft_d", Fixed, Mm, Const;
    MotorBoltCircle => "motor_bolt_circle", Fixed, Mm, Const;
    MotorBoltCount => "motor_bolt_count", Fixed, Count, Const;
    MotorPeakTorque => "motor_peak_torque", Fixed, Nm, Const;
    DeltaRw => "delta_rw", Fixed, Mm, Const;
    Rce => "R_ce", Fixed, Mm, Const;
    DeltaCe => "delta_ce", Fixed, Mm, Const;
    Kmgd => "K_mgd", Fixed, Dimensionless, Const;
    SigmaAllow => "sigma_allow", Fixed, Mpa, Const;
    SafetyFactor => "safety_factor", Fixed, Dimensionless, Const;
    MinFaceWidth => "min_face_width", Fixed, Mm, Const;
    MaxFaceWidth => "max_face_width", Fixed, Mm, Const;
    LewisY0 => "lewis_y0", Fixed, Dimensionless, Const;
    LewisY1 => "lewis_y1", Fixed, Dimensionless, Const;
    AxialClearance => "axial_clearance", Fixed, Mm, Const;
    Wall => "wall", Fixed, Mm, Const;
    CarrierPlateT => "carrier_plate_t", Fixed, Mm, Const;
    CompoundLand => "compound_land", Fixed, Mm, Const;
    HousingClearance => "housing_clearance", Fixed, Mm, Const;
    FlangeT => "flange_t", Fixed, Mm, Const;
    PlanetPinD => "planet_pin_d", Fixed, Mm, Const;
    SunBoltD => "sun_bolt_d", Fixed, Mm, Const;
    HousingBoltD => "housing_bolt_d", Fixed, Mm, Const;
    HousingBoltCount => "housing_bolt_count", Fixed, Count, Const;

    Ds1 => "d_s1", Dependent, Mm, Stage1;
    Dp1 => "d_p1", Dependent, Mm, Stage1;
    Dr1 => "d_r1", Dependent, Mm, Stage1;
    Ds2 => "d_s2", Dependent, Mm, Stage2;
    Dp2 => "d_p2", Dependent, Mm, Stage2;
    Dr2 => "d_r2", Dependent, Mm, Stage2;
    A1 => "a_1", Dependent, Mm, Stage1;
    A2 => "a_2", Dependent, Mm, Stage2;
    B1 => "b_1", Dependent, Mm, Stage1;
    B2 => "b_2", Dependent, Mm, Global;
    RingOd1 => "ring_od_1", Dependent, Mm, Stage1;
    RingOd2 => "ring_od_2", Dependent, Mm, Stage2;
    PlanetEnv1 => "planet_env_1", Dependent, Mm, Stage1;
    PlanetEnv2 => "planet_env_2", Dependent, Mm, Stage2;
    CarrierOd1 => "carrier_od_1", Dependent, Mm, Stage1;
    CarrierOd2 => "carrier_od_2", Dependent, Mm, Stage2;
    DMax => "D_max", Dependent, Mm, Const;
    DGb => "D_gb", Dependent, Mm, Global;
    HousingId => "housing_id", Dependent, Mm, Global;
    HousingOd => "housing_od", Dependent, Mm, Global;
    GearboxWidth => "gearbox_width", Dependent, Mm, Global;
    ActuatorWidth => "actuator_width", Dependent, Mm, Global;
}

pub const SYMBOL_COUNT: usize = Sym::ALL.len();

impl Sym {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Sym> {
        Sym::ALL.iter().copied().find(|s| s.name() == name)
    }

    /// Whether the symbol carries a value for this topology.
    pub fn active(self, topology: Topology) -> bool {
        use Sym::*;
        use Topology::*;
        match self {
            Ns2 | Ds2 => topology == Dspg,
            Nr1 | Dr1 | RingOd1 => topology != Cpg,
            Np2 | Nr2 | Module2 | Planets2 | Dp2 | Dr2 | A2 | B2 | RingOd2 | PlanetEnv2 => topology != Sspg,
            CarrierOd2 => topology == Dspg,
            _ => true,
        }
    }
}

/// Hardware layout constants not covered by the sizing or constraint parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutParams {
    /// Radial gap between the largest rotating part and the housing bore.
    pub housing_clearance: f64,
    pub flange_thickness: f64,
    pub planet_pin_diameter: f64,
    pub sun_bolt_diameter: f64,
    pub housing_bolt_diameter: f64,
    pub housing_bolt_count: u32,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            housing_clearance: 1.0,
            flange_thickness: 5.0,
            planet_pin_diameter: 3.0,
            sun_bolt_diameter: 3.0,
            housing_bolt_diameter: 3.0,
            housing_bolt_count: 6,
        }
    }
}

/// Values for every symbol. Inactive symbols hold 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scope {
    topology: Topology,
    values: [f64; SYMBOL_COUNT],
}

impl Scope {
    /// A scope with only the fixed dimensions filled in.
    pub fn fixed(motor: &MotorSpec, constraints: &ConstraintParams, sizing: &SizingParams, layout: &LayoutParams) -> Scope {
        let mut s = Scope {
            topology: Topology::Sspg,
            values: [0.0; SYMBOL_COUNT],
        };
        use Sym::*;
        for (sym, v) in [
            (MotorOd, motor.outer_diameter),
            (MotorStack, motor.stack_length),
            (MotorShaftD, motor.shaft_diameter),
            (MotorBoltCircle, motor.bolt_circle_diameter),
            (MotorBoltCount, motor.bolt_count as f64),
            (MotorPeakTorque, motor.peak_torque),
            (DeltaRw, constraints.ring_radial_width),
            (Rce, constraints.carrier_extrusion_radius),
            (DeltaCe, constraints.min_clearance),
            (Kmgd, constraints.diameter_factor),
            (SigmaAllow, sizing.allowable_stress),
            (SafetyFactor, sizing.safety_factor),
            (MinFaceWidth, sizing.min_face_width),
            (MaxFaceWidth, sizing.max_face_width),
            (LewisY0, sizing.lewis_y0),
            (LewisY1, sizing.lewis_y1),
            (AxialClearance, sizing.axial_clearance),
            (Wall, sizing.wall_thickness),
            (CarrierPlateT, sizing.carrier_plate_thickness),
            (CompoundLand, sizing.compound_land),
            (HousingClearance, layout.housing_clearance),
            (FlangeT, layout.flange_thickness),
            (PlanetPinD, layout.planet_pin_diameter),
            (SunBoltD, layout.sun_bolt_diameter),
            (HousingBoltD, layout.housing_bolt_diameter),
            (HousingBoltCount, layout.housing_bolt_count as f64),
        ] {
            s.values[sym.index()] = v;
        }
        s.values[DMax.index()] = constraints.diameter_factor * motor.outer_diameter;
        s
    }

    /// Fills optimization and dependent values for `design` with the given
    /// face widths and gearbox width. Works for empty designs as well.
    pub fn with_design(&self, design: &GearboxDesign, faces: [f64; 2], gearbox_width: f64) -> Scope {
        use Sym::*;
        let mut s = *self;
        s.topology = design.topology;
        let x = design.variables();
        let opt = [Ns1, Np1, Nr1, Ns2, Np2, Nr2, Module1, Module2, Planets1, Planets2];
        for (i, sym) in opt.into_iter().enumerate() {
            s.values[sym.index()] = if matches!(sym, Module1 | Module2) {
                x[i] as f64 / 10.0
            } else {
                x[i] as f64
            };
        }
        let (s1, s2) = (&design.stage1, &design.stage2);
        let d = |st: &GearStage, z: u32| st.pitch_diameter(z);
        let delta = s.get(DeltaRw);
        let ring_od = |st: &GearStage| if st.ring_teeth > 0 { d(st, st.ring_teeth) + 2.0 * delta } else { 0.0 };

        let a1 = if s1.sun_teeth > 0 { s1.module.mm() * (s1.sun_teeth + s1.planet_teeth) as f64 / 2.0 } else { 0.0 };
        let a2 = match design.topology {
            Topology::Sspg => 0.0,
            Topology::Dspg => s2.module.mm() * (s2.sun_teeth + s2.planet_teeth) as f64 / 2.0,
            Topology::Cpg | Topology::Wpg => s2.module.mm() * (s2.ring_teeth as f64 - s2.planet_teeth as f64) / 2.0,
        };
        let env = |a: f64, st: &GearStage| if st.planet_teeth > 0 { 2.0 * a + d(st, st.planet_teeth) } else { 0.0 };
        let (r_ce, wall) = (s.get(Rce), s.get(Wall));
        let carrier = |a: f64| 2.0 * a + 2.0 * r_ce + 2.0 * wall;

        s.set(Ds1, d(s1, s1.sun_teeth));
        s.set(Dp1, d(s1, s1.planet_teeth));
        s.set(Dr1, d(s1, s1.ring_teeth));
        s.set(Ds2, d(s2, s2.sun_teeth));
        s.set(Dp2, d(s2, s2.planet_teeth));
        s.set(Dr2, d(s2, s2.ring_teeth));
        s.set(A1, a1);
        s.set(A2, a2);
        s.set(B1, faces[0]);
        s.set(B2, faces[1]);
        s.set(RingOd1, ring_od(s1));
        s.set(RingOd2, ring_od(s2));
        s.set(PlanetEnv1, env(a1, s1));
        s.set(PlanetEnv2, env(a2, s2));
        let empty = design.is_empty();
        s.set(CarrierOd1, if empty { 0.0 } else { carrier(a1) });
        s.set(CarrierOd2, if design.topology == Topology::Dspg && !empty { carrier(a2) } else { 0.0 });
        let gb = [RingOd1, RingOd2, PlanetEnv1, PlanetEnv2]
            .iter()
            .map(|&k| s.get(k))
            .fold(0.0, f64::max);
        s.set(DGb, gb);
        let housing_id = gb.max(s.get(MotorOd)) + 2.0 * s.get(HousingClearance);
        s.set(HousingId, housing_id);
        s.set(HousingOd, housing_id + 2.0 * s.get(Wall));
        s.set(GearboxWidth, gearbox_width);
        s.set(ActuatorWidth, gearbox_width + s.get(MotorStack) + 2.0 * s.get(Wall));
        s
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn get(&self, sym: Sym) -> f64 {
        self.values[sym.index()]
    }

    pub fn set(&mut self, sym: Sym, value: f64) {
        self.values[sym.index()] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Active symbols with their values, in registry order.
    pub fn entries(&self) -> impl Iterator<Item = (Sym, f64)> + '_ {
        Sym::ALL
            .iter()
            .copied()
            .filter(|s| s.active(self.topology))
            .map(|s| (s, self.get(s)))
    }
}

/// Lewis clamp written out over scope names.
fn lewis(force: &str, module: &str, teeth: &str) -> String {
    format!(
        "min(max(safety_factor * ({force}) / (sigma_allow * {module} * (lewis_y0 - lewis_y1 / {teeth})), min_face_width), max_face_width)"
    )
}

/// Defining expression of each dependent symbol over earlier symbols. These
/// are documentation for CAD users and an independent check on the values.
pub fn dependent_expression(sym: Sym, topology: Topology) -> Option<String> {
    use Sym::*;
    use Topology::*;
    if sym.group() != Group::Dependent || !sym.active(topology) {
        return None;
    }
    let sun_force = "2000 * motor_peak_torque / (d_s1 * n_p1)";
    let s = match sym {
        Ds1 => "module_1 * N_s1".into(),
        Dp1 => "module_1 * N_p1".into(),
        Dr1 => "module_1 * N_r1".into(),
        Ds2 => "module_2 * N_s2".into(),
        Dp2 => "module_2 * N_p2".into(),
        Dr2 => "module_2 * N_r2".into(),
        A1 => "module_1 * (N_s1 + N_p1) / 2".into(),
        A2 => match topology {
            Dspg => "module_2 * (N_s2 + N_p2) / 2".into(),
            _ => "module_2 * (N_r2 - N_p2) / 2".into(),
        },
        B1 => match topology {
            Wpg => lewis(
                &format!("{sun_force} * (d_p1 + d_p2) / abs(d_p2 - d_p1)"),
                "module_1",
                "min(N_s1, N_p1)",
            ),
            _ => lewis(sun_force, "module_1", "min(N_s1, N_p1)"),
        },
        B2 => match topology {
            Dspg => lewis(
                "2000 * motor_peak_torque * (N_s1 + N_r1) / N_s1 / (d_s2 * n_p2)",
                "module_2",
                "min(N_s2, N_p2)",
            ),
            Cpg => lewis(&format!("{sun_force} * d_p1 / d_p2"), "module_2", "N_p2"),
            _ => lewis(&format!("{sun_force} * 2 * d_p1 / abs(d_p2 - d_p1)"), "module_2", "N_p2"),
        },
        RingOd1 => "d_r1 + 2 * delta_rw".into(),
        RingOd2 => "d_r2 + 2 * delta_rw".into(),
        PlanetEnv1 => "2 * a_1 + d_p1".into(),
        PlanetEnv2 => "2 * a_2 + d_p2".into(),
        CarrierOd1 => "2 * a_1 + 2 * R_ce + 2 * wall".into(),
        CarrierOd2 => "2 * a_2 + 2 * R_ce + 2 * wall".into(),
        DMax => "K_mgd * motor_od".into(),
        DGb => match topology {
            Sspg => "max(ring_od_1, planet_env_1)".into(),
            Cpg => "max(ring_od_2, planet_env_1, planet_env_2)".into(),
            _ => "max(ring_od_1, ring_od_2, planet_env_1, planet_env_2)".into(),
        },
        HousingId => "max(D_gb, motor_od) + 2 * housing_clearance".into(),
        HousingOd => "housing_id + 2 * wall".into(),
        GearboxWidth => match topology {
            Sspg => "b_1 + 2 * axial_clearance + carrier_plate_t".into(),
            Dspg => "b_1 + b_2 + 4 * axial_clearance + 2 * carrier_plate_t".into(),
            _ => "b_1 + b_2 + compound_land + 4 * axial_clearance + carrier_plate_t".into(),
        },
        ActuatorWidth => "gearbox_width + motor_stack + 2 * wall".into(),
        _ => return None,
    };
    Some(s)
}
