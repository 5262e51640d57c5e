//! Gearbox topologies and the design-variable vector shared by every module.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("module {0} mm is not a multiple of 0.1 mm")]
    InvalidModule(f64),
    #[error("unknown gearbox type `{0}` (expected sspg, cpg, dspg or wpg)")]
    UnknownTopology(String),
    #[error("{topology} design is malformed: {detail}")]
    Shape { topology: Topology, detail: String },
    #[error("Wolfrom gearbox with I2 = 1 has an infinite reduction")]
    DegenerateRatio,
    #[error("Wolfrom efficiency denominator vanishes ({denominator:e})")]
    DegenerateEfficiency { denominator: f64 },
    #[error("efficiency {value} is outside (0, 1]")]
    EfficiencyOutOfRange { value: f64 },
    #[error("friction factor {0} outside [0, 2)")]
    InvalidFrictionFactor(f64),
}

/// The four planetary layouts. Ordering follows the usual presentation order
/// and is used for deterministic output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Single-stage: sun input, ring fixed, carrier output.
    Sspg,
    /// Compound: stepped planets, sun drives the large planet, small planet runs in a fixed ring.
    Cpg,
    /// Two single stages in series, carrier 1 drives sun 2.
    Dspg,
    /// Wolfrom (3K): stepped planets, ring 1 fixed, ring 2 output.
    Wpg,
}

impl Topology {
    pub const ALL: [Topology; 4] = [Topology::Sspg, Topology::Cpg, Topology::Dspg, Topology::Wpg];

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Sspg => "sspg",
            Topology::Cpg => "cpg",
            Topology::Dspg => "dspg",
            Topology::Wpg => "wpg",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Topology::Sspg => "SSPG",
            Topology::Cpg => "CPG",
            Topology::Dspg => "DSPG",
            Topology::Wpg => "WPG",
        }
    }

    pub fn stage_count(self) -> usize {
        match self {
            Topology::Sspg => 1,
            _ => 2,
        }
    }

    /// Stepped planets shared by both stages.
    pub fn has_compound_planets(self) -> bool {
        matches!(self, Topology::Cpg | Topology::Wpg)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Topology {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sspg" => Ok(Topology::Sspg),
            "cpg" => Ok(Topology::Cpg),
            "dspg" => Ok(Topology::Dspg),
            "wpg" => Ok(Topology::Wpg),
            other => Err(DesignError::UnknownTopology(other.to_string())),
        }
    }
}

/// Gear module stored in integer tenths of a millimetre so that geometric
/// equalities can be checked exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Module(u32);

impl Module {
    pub const ZERO: Module = Module(0);

    pub const fn from_tenths(tenths: u32) -> Self {
        Module(tenths)
    }

    pub fn from_mm(mm: f64) -> Result<Self, DesignError> {
        let tenths = (mm * 10.0).round();
        if !mm.is_finite() || mm < 0.0 || (mm * 10.0 - tenths).abs() > 1e-6 {
            return Err(DesignError::InvalidModule(mm));
        }
        Ok(Module(tenths as u32))
    }

    pub fn tenths(self) -> u32 {
        self.0
    }

    pub fn mm(self) -> f64 {
        self.0 as f64 / 10.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}", self.mm())
    }
}

impl Serialize for Module {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.mm())
    }
}

impl<'de> Deserialize<'de> for Module {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let mm = f64::deserialize(deserializer)?;
        Module::from_mm(mm).map_err(serde::de::Error::custom)
    }
}

/// One planetary layer: `[N_s, N_p, N_r, m, n_p]`. Zero entries mark gears that
/// do not exist in this stage for the given topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GearStage {
    pub sun_teeth: u32,
    pub planet_teeth: u32,
    pub ring_teeth: u32,
    pub module: Module,
    pub planet_count: u32,
}

impl GearStage {
    pub const EMPTY: GearStage = GearStage {
        sun_teeth: 0,
        planet_teeth: 0,
        ring_teeth: 0,
        module: Module::ZERO,
        planet_count: 0,
    };

    pub fn new(sun: u32, planet: u32, ring: u32, module: Module, planet_count: u32) -> Self {
        GearStage {
            sun_teeth: sun,
            planet_teeth: planet,
            ring_teeth: ring,
            module,
            planet_count,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == GearStage::EMPTY
    }

    pub fn pitch_diameter(&self, teeth: u32) -> f64 {
        self.module.mm() * teeth as f64
    }

    /// Pitch diameter in tenths of a millimetre, exact.
    pub fn pitch_tenths(&self, teeth: u32) -> u64 {
        self.module.tenths() as u64 * teeth as u64
    }
}

/// A complete candidate: topology plus both stage slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GearboxDesign {
    pub topology: Topology,
    pub stage1: GearStage,
    pub stage2: GearStage,
}

/// The ten-entry design vector `[N_s1, N_p1, N_r1, N_s2, N_p2, N_r2, m_1, m_2, n_p1, n_p2]`
/// with modules in tenths of a millimetre. Its lexicographic order is the
/// tie-break used by every search.
pub type VariableVector = [u32; 10];

impl GearboxDesign {
    pub fn sspg(stage: GearStage) -> Self {
        GearboxDesign {
            topology: Topology::Sspg,
            stage1: stage,
            stage2: GearStage::EMPTY,
        }
    }

    pub fn cpg(
        sun: u32,
        planet1: u32,
        planet2: u32,
        ring2: u32,
        module1: Module,
        module2: Module,
        planets: u32,
    ) -> Self {
        GearboxDesign {
            topology: Topology::Cpg,
            stage1: GearStage::new(sun, planet1, 0, module1, planets),
            stage2: GearStage::new(0, planet2, ring2, module2, planets),
        }
    }

    pub fn dspg(stage1: GearStage, stage2: GearStage) -> Self {
        GearboxDesign {
            topology: Topology::Dspg,
            stage1,
            stage2,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn wpg(
        sun: u32,
        planet1: u32,
        ring1: u32,
        planet2: u32,
        ring2: u32,
        module1: Module,
        module2: Module,
        planets: u32,
    ) -> Self {
        GearboxDesign {
            topology: Topology::Wpg,
            stage1: GearStage::new(sun, planet1, ring1, module1, planets),
            stage2: GearStage::new(0, planet2, ring2, module2, planets),
        }
    }

    /// Builds a design from two `[N_s, N_p, N_r, m, n_p]` rows as printed in
    /// design tables, with the module given in millimetres.
    pub fn from_rows(
        topology: Topology,
        stage1: ([u32; 3], f64, u32),
        stage2: ([u32; 3], f64, u32),
    ) -> Result<Self, DesignError> {
        let build = |(teeth, m, n): ([u32; 3], f64, u32)| -> Result<GearStage, DesignError> {
            Ok(GearStage::new(teeth[0], teeth[1], teeth[2], Module::from_mm(m)?, n))
        };
        Ok(GearboxDesign {
            topology,
            stage1: build(stage1)?,
            stage2: build(stage2)?,
        })
    }

    pub fn from_variables(topology: Topology, x: VariableVector) -> Self {
        GearboxDesign {
            topology,
            stage1: GearStage::new(x[0], x[1], x[2], Module::from_tenths(x[6]), x[8]),
            stage2: GearStage::new(x[3], x[4], x[5], Module::from_tenths(x[7]), x[9]),
        }
    }

    pub fn variables(&self) -> VariableVector {
        let (a, b) = (&self.stage1, &self.stage2);
        [
            a.sun_teeth,
            a.planet_teeth,
            a.ring_teeth,
            b.sun_teeth,
            b.planet_teeth,
            b.ring_teeth,
            a.module.tenths(),
            b.module.tenths(),
            a.planet_count,
            b.planet_count,
        ]
    }

    pub fn stage(&self, index: usize) -> &GearStage {
        match index {
            1 => &self.stage1,
            2 => &self.stage2,
            _ => panic!("stage index must be 1 or 2, got {index}"),
        }
    }

    /// True when no gear at all is present (used for housing-only estimates).
    pub fn is_empty(&self) -> bool {
        self.stage1.is_empty() && self.stage2.is_empty()
    }

    /// Checks the zero pattern each topology imposes on the variable vector.
    pub fn validate(&self) -> Result<(), DesignError> {
        let fail = |detail: String| {
            Err(DesignError::Shape {
                topology: self.topology,
                detail,
            })
        };
        let (s1, s2) = (&self.stage1, &self.stage2);
        let full = |s: &GearStage| {
            s.sun_teeth > 0 && s.planet_teeth > 0 && s.ring_teeth > 0 && !s.module.is_zero() && s.planet_count > 0
        };
        match self.topology {
            Topology::Sspg => {
                if !full(s1) {
                    return fail("stage 1 needs sun, planet, ring, module and planet count".into());
                }
                if !s2.is_empty() {
                    return fail("stage 2 must be entirely zero".into());
                }
            }
            Topology::Dspg => {
                if !full(s1) || !full(s2) {
                    return fail("both stages need sun, planet, ring, module and planet count".into());
                }
            }
            Topology::Cpg | Topology::Wpg => {
                let wants_ring1 = self.topology == Topology::Wpg;
                if s1.sun_teeth == 0 || s1.planet_teeth == 0 || s1.module.is_zero() || s1.planet_count == 0 {
                    return fail("stage 1 needs sun, planet 1, module and planet count".into());
                }
                if wants_ring1 && s1.ring_teeth == 0 {
                    return fail("stage 1 needs ring 1".into());
                }
                if !wants_ring1 && s1.ring_teeth != 0 {
                    return fail("stage 1 ring must be zero".into());
                }
                if s2.sun_teeth != 0 {
                    return fail("stage 2 sun must be zero".into());
                }
                if s2.planet_teeth == 0 || s2.ring_teeth == 0 || s2.module.is_zero() {
                    return fail("stage 2 needs planet 2, ring 2 and module".into());
                }
                if s1.planet_count != s2.planet_count {
                    return fail(format!(
                        "stepped planets require n_p1 = n_p2 (got {} and {})",
                        s1.planet_count, s2.planet_count
                    ));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for GearboxDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |s: &GearStage| {
            format!(
                "[{}, {}, {}, {}, {}]",
                s.sun_teeth, s.planet_teeth, s.ring_teeth, s.module, s.planet_count
            )
        };
        write!(f, "{} {} / {}", self.topology, row(&self.stage1), row(&self.stage2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_round_trips_tenths() {
        assert_eq!(Module::from_mm(0.6).unwrap().tenths(), 6);
        assert_eq!(Module::from_mm(1.2).unwrap().mm(), 1.2);
        assert!(Module::from_mm(0.55).is_err());
        assert!(Module::from_mm(-1.0).is_err());
    }

    #[test]
    fn variable_vector_round_trip() {
        let d = GearboxDesign::wpg(66, 45, 156, 33, 144, Module::from_tenths(5), Module::from_tenths(5), 6);
        assert_eq!(d.variables(), [66, 45, 156, 0, 33, 144, 5, 5, 6, 6]);
        assert_eq!(GearboxDesign::from_variables(Topology::Wpg, d.variables()), d);
    }

    #[test]
    fn shape_rules_per_topology() {
        let m = Module::from_tenths(5);
        assert!(GearboxDesign::sspg(GearStage::new(25, 65, 155, m, 3)).validate().is_ok());
        let mut bad = GearboxDesign::sspg(GearStage::new(25, 65, 155, m, 3));
        bad.stage2.planet_teeth = 20;
        assert!(bad.validate().is_err());

        let cpg = GearboxDesign::cpg(18, 66, 33, 117, Module::from_tenths(6), Module::from_tenths(6), 3);
        assert!(cpg.validate().is_ok());
        let mut uneven = cpg;
        uneven.stage2.planet_count = 4;
        assert!(uneven.validate().is_err());

        let mut ring_in_cpg = cpg;
        ring_in_cpg.stage1.ring_teeth = 150;
        assert!(ring_in_cpg.validate().is_err());
    }

    #[test]
    fn topology_parses_case_insensitively() {
        assert_eq!("CPG".parse::<Topology>().unwrap(), Topology::Cpg);
        assert!("cyclo".parse::<Topology>().is_err());
    }
}
